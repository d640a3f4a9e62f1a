// Copyright 2026 The Spinnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spinnet {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Hilbert-space layout.
//
// Each triode is realized by one proton pair, so T triodes occupy 2T spin-1/2
// slots. Slots are ordered triode-major, proton-minor: slot(tau, p) = 2*tau + p
// with 0-based tau in [0, T) and p in {0, 1}. Kronecker products put the first
// factor on the most significant bits, i.e. basis index
//     i = sum_s b_s * 2^(2T - 1 - s),    b_s in {up = 0, down = 1}.
// Per slot the basis is (|up>, |down>); per pair it runs
// |uu>, |ud>, |du>, |dd>.
// ---------------------------------------------------------------------------

inline std::int64_t hilbert_dim(int t_count) {
    if (t_count < 1 || t_count > 15)
        throw std::invalid_argument("triode count out of supported range [1, 15]");
    return std::int64_t{1} << (2 * t_count);
}

enum class Axis : int { x = 0, y = 1, z = 2 };

inline Matrix pauli_matrix(Axis a) {
    Matrix m(2, 2);
    const Complex i{0.0, 1.0};
    switch (a) {
        case Axis::x: m << 0, 1, 1, 0; break;
        case Axis::y: m << 0, -i, i, 0; break;
        case Axis::z: m << 1, 0, 0, -1; break;
    }
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
}

// Embeds a 2x2 operator on one spin slot into the full 4^T space without
// materializing identity factors.
inline Matrix embed_one_site(int t_count, int slot, const Matrix& m2) {
    const std::int64_t dim = hilbert_dim(t_count);
    if (slot < 0 || slot >= 2 * t_count) throw std::invalid_argument("slot out of range");
    if (m2.rows() != 2 || m2.cols() != 2) throw std::invalid_argument("expected a 2x2 block");
    const int shift = 2 * t_count - 1 - slot;
    const std::int64_t mask = std::int64_t{1} << shift;
    Matrix out = Matrix::Zero(dim, dim);
    for (std::int64_t j = 0; j < dim; ++j) {
        const int bj = static_cast<int>(j >> shift & 1);
        for (int bi = 0; bi < 2; ++bi) {
            const Complex amp = m2(bi, bj);
            if (amp == Complex{}) continue;
            const std::int64_t i = (j & ~mask) | (std::int64_t{bi} << shift);
            out(i, j) += amp;
        }
    }
    return out;
}

// Embeds a 4x4 operator on triode tau's proton pair (slots 2*tau, 2*tau + 1).
inline Matrix embed_pair_operator(int t_count, int tau, const Matrix& m4) {
    const std::int64_t dim = hilbert_dim(t_count);
    if (tau < 0 || tau >= t_count) throw std::invalid_argument("triode index out of range");
    if (m4.rows() != 4 || m4.cols() != 4) throw std::invalid_argument("expected a 4x4 block");
    const int lo = 2 * t_count - 2 - 2 * tau;
    const std::int64_t mask = std::int64_t{3} << lo;
    Matrix out = Matrix::Zero(dim, dim);
    for (std::int64_t j = 0; j < dim; ++j) {
        const int pj = static_cast<int>(j >> lo & 3);
        for (int pi = 0; pi < 4; ++pi) {
            const Complex amp = m4(pi, pj);
            if (amp == Complex{}) continue;
            const std::int64_t i = (j & ~mask) | (std::int64_t{pi} << lo);
            out(i, j) += amp;
        }
    }
    return out;
}

// In-place h += coeff * embed_pair_operator(t_count, tau, m4). The hot path of
// time-dependent Hamiltonian assembly: O(16 * dim / 4) scalar updates instead
// of a dim x dim temporary.
inline void add_pair_operator(Matrix& h, int t_count, int tau, const Matrix& m4, Complex coeff) {
    const std::int64_t dim = hilbert_dim(t_count);
    const int lo = 2 * t_count - 2 - 2 * tau;
    const std::int64_t mask = std::int64_t{3} << lo;
    for (std::int64_t j = 0; j < dim; ++j) {
        const int pj = static_cast<int>(j >> lo & 3);
        for (int pi = 0; pi < 4; ++pi) {
            const Complex amp = m4(pi, pj);
            if (amp == Complex{}) continue;
            h((j & ~mask) | (std::int64_t{pi} << lo), j) += coeff * amp;
        }
    }
}

// sigma acting on one proton of a pair, as a 4x4 block.
inline Matrix pair_pauli(int proton, Axis a) {
    if (proton != 0 && proton != 1) throw std::invalid_argument("proton index is 0 or 1");
    const Matrix id = Matrix::Identity(2, 2);
    return proton == 0 ? kron(pauli_matrix(a), id) : kron(id, pauli_matrix(a));
}

inline Matrix embed_pauli(int t_count, int tau, int proton, Axis a) {
    return embed_one_site(t_count, 2 * tau + proton, pauli_matrix(a));
}

// Total-spin component s_{tau,a} = (sigma_{tau,1,a} + sigma_{tau,2,a}) / 2.
inline Matrix spin_component(int t_count, int tau, Axis a) {
    return 0.5 * (embed_pauli(t_count, tau, 0, a) + embed_pauli(t_count, tau, 1, a));
}

// Node observable q_{tau,a} = s_{tau,a}^2, a commuting family of projectors.
inline Matrix q_operator(int t_count, int tau, Axis a) {
    const Matrix s = spin_component(t_count, tau, a);
    return s * s;
}

// Pair-local 4x4 versions, for cached per-triode assembly.
inline Matrix pair_spin_component(Axis a) {
    return 0.5 * (pair_pauli(0, a) + pair_pauli(1, a));
}

inline Matrix pair_q_operator(Axis a) {
    const Matrix s = pair_spin_component(a);
    return s * s;
}

// Proton-exchange on triode tau: the permutation |.., b_1 b_2, ..> ->
// |.., b_2 b_1, ..>. Equal to (1 + sigma_1 . sigma_2) / 2 on the pair.
inline Matrix exchange_operator(int t_count, int tau) {
    Matrix swap4 = Matrix::Zero(4, 4);
    swap4(0, 0) = swap4(3, 3) = 1;
    swap4(1, 2) = swap4(2, 1) = 1;
    return embed_pair_operator(t_count, tau, swap4);
}

// Projector onto the exchange-symmetric (all-pairs-triplet) subspace:
// the product of per-pair (1 + X_tau) / 2 factors, rank 3^T.
inline Matrix symmetrizer(int t_count) {
    Matrix pair_proj(4, 4);
    pair_proj << 1, 0, 0, 0,
                 0, 0.5, 0.5, 0,
                 0, 0.5, 0.5, 0,
                 0, 0, 0, 1;
    Matrix p = Matrix::Identity(1, 1);
    for (int tau = 0; tau < t_count; ++tau) p = kron(p, pair_proj);
    return p;
}

// ---------------------------------------------------------------------------
// Joint q-eigenbasis of a pair. Columns of pair_qbasis_matrix are the
// simultaneous eigenvectors of (q_x, q_y, q_z); pair_q_tuple gives their
// eigenvalue triples. The singlet is the unique odd-parity point (0,0,0);
// the triplets realize the two-hot rows.
// ---------------------------------------------------------------------------

enum class PairKind : int { singlet = 0, t_x = 1, t_y = 2, t_z = 3 };

inline Vector pair_basis_state(PairKind k) {
    Vector v = Vector::Zero(4);
    const double r = 1.0 / std::sqrt(2.0);
    const Complex i{0.0, 1.0};
    switch (k) {
        case PairKind::singlet: v(1) = r; v(2) = -r; break;      // (|ud> - |du>)/sqrt2
        case PairKind::t_x: v(3) = r; v(0) = -r; break;          // (|dd> - |uu>)/sqrt2
        case PairKind::t_y: v(0) = i * r; v(3) = i * r; break;   // i(|uu> + |dd>)/sqrt2
        case PairKind::t_z: v(1) = r; v(2) = r; break;           // (|ud> + |du>)/sqrt2
    }
    return v;
}

inline std::array<int, 3> pair_q_tuple(PairKind k) {
    switch (k) {
        case PairKind::singlet: return {0, 0, 0};
        case PairKind::t_x: return {0, 1, 1};
        case PairKind::t_y: return {1, 0, 1};
        case PairKind::t_z: return {1, 1, 0};
    }
    throw std::invalid_argument("bad pair kind");
}

inline Matrix pair_qbasis_matrix() {
    Matrix b(4, 4);
    for (int k = 0; k < 4; ++k) b.col(k) = pair_basis_state(static_cast<PairKind>(k));
    return b;
}

// ---------------------------------------------------------------------------
// Small numeric helpers shared across modules.
// ---------------------------------------------------------------------------

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Debug dump: "rows cols" header, then one row per line of re,im pairs.
// Round-trips through parse_operator_dump for fixture files.
inline std::string dump_operator(const Matrix& m) {
    std::ostringstream out;
    out.precision(17);
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ' ';
            out << m(r, c).real() << ',' << m(r, c).imag();
        }
        out << '\n';
    }
    return out.str();
}

inline Matrix parse_operator_dump(const std::string& text) {
    std::istringstream in(text);
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows < 1 || cols < 1)
        throw std::invalid_argument("bad operator dump header");
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            double re = 0, im = 0;
            char comma = 0;
            if (!(in >> re >> comma >> im) || comma != ',')
                throw std::invalid_argument("bad operator dump entry");
            m(r, c) = Complex{re, im};
        }
    }
    return m;
}

inline bool is_hermitian(const Matrix& m, double tol = 1e-12) {
    return max_abs(Matrix(m - m.adjoint())) <= tol;
}

inline bool approx_equal(const Matrix& a, const Matrix& b, double tol = 1e-12) {
    return a.rows() == b.rows() && a.cols() == b.cols() && max_abs(Matrix(a - b)) <= tol;
}

}  // namespace spinnet
