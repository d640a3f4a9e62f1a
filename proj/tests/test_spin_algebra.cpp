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

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include <Eigen/Eigenvalues>

#include "spinnet/spin_algebra.hpp"

using namespace spinnet;

namespace {

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

constexpr Axis kAxes[] = {Axis::x, Axis::y, Axis::z};

}  // namespace

TEST_CASE("pauli matrices satisfy the su(2) algebra", "[spin]") {
    const Matrix id = Matrix::Identity(2, 2);
    const Complex i{0.0, 1.0};
    for (Axis a : kAxes) {
        const Matrix sa = pauli_matrix(a);
        REQUIRE(is_hermitian(sa, 1e-15));
        REQUIRE(std::abs(sa.trace()) < 1e-15);
        REQUIRE(approx_equal(sa * sa, id, 1e-15));
    }
    // [sigma_a, sigma_b] = 2i eps_abc sigma_c
    REQUIRE(approx_equal(commutator(pauli_matrix(Axis::x), pauli_matrix(Axis::y)),
                         2.0 * i * pauli_matrix(Axis::z), 1e-15));
    REQUIRE(approx_equal(commutator(pauli_matrix(Axis::y), pauli_matrix(Axis::z)),
                         2.0 * i * pauli_matrix(Axis::x), 1e-15));
    REQUIRE(approx_equal(commutator(pauli_matrix(Axis::z), pauli_matrix(Axis::x)),
                         2.0 * i * pauli_matrix(Axis::y), 1e-15));
}

TEST_CASE("basis layout puts the first slot on the high bits", "[spin]") {
    const Matrix z1 = embed_pauli(1, 0, 0, Axis::z);
    const Matrix z2 = embed_pauli(1, 0, 1, Axis::z);
    const Eigen::Vector4d d1 = z1.diagonal().real();
    const Eigen::Vector4d d2 = z2.diagonal().real();
    REQUIRE(d1.isApprox(Eigen::Vector4d(1, 1, -1, -1)));
    REQUIRE(d2.isApprox(Eigen::Vector4d(1, -1, 1, -1)));
}

TEST_CASE("embeddings on distinct slots commute", "[spin]") {
    const int t_count = 2;
    const Matrix a = embed_pauli(t_count, 0, 0, Axis::x);
    const Matrix b = embed_pauli(t_count, 0, 1, Axis::y);
    const Matrix c = embed_pauli(t_count, 1, 0, Axis::z);
    REQUIRE(max_abs(commutator(a, b)) < 1e-14);
    REQUIRE(max_abs(commutator(a, c)) < 1e-14);
    REQUIRE(max_abs(commutator(b, c)) < 1e-14);
}

TEST_CASE("pair embedding agrees with slot embedding", "[spin]") {
    const int t_count = 3;
    for (int tau = 0; tau < t_count; ++tau) {
        for (int proton = 0; proton < 2; ++proton) {
            for (Axis a : kAxes) {
                const Matrix via_pair =
                    embed_pair_operator(t_count, tau, pair_pauli(proton, a));
                const Matrix via_slot = embed_pauli(t_count, tau, proton, a);
                REQUIRE(approx_equal(via_pair, via_slot, 1e-15));
            }
        }
    }
}

TEST_CASE("add_pair_operator accumulates the embedded block", "[spin]") {
    const int t_count = 2;
    const Matrix m4 = pair_pauli(0, Axis::x) * pair_pauli(1, Axis::y);
    Matrix h = Matrix::Zero(hilbert_dim(t_count), hilbert_dim(t_count));
    add_pair_operator(h, t_count, 1, m4, Complex{0.0, -2.5});
    const Matrix expected = Complex{0.0, -2.5} * embed_pair_operator(t_count, 1, m4);
    REQUIRE(approx_equal(h, expected, 1e-15));
}

TEST_CASE("node observables are commuting projectors", "[spin]") {
    const int t_count = 2;
    std::vector<Matrix> qs;
    for (int tau = 0; tau < t_count; ++tau)
        for (Axis a : kAxes) qs.push_back(q_operator(t_count, tau, a));
    for (const auto& q : qs) {
        REQUIRE(is_hermitian(q));
        REQUIRE(approx_equal(q * q, q, 1e-13));  // idempotent: eigenvalues in {0, 1}
    }
    for (std::size_t i = 0; i < qs.size(); ++i)
        for (std::size_t j = i + 1; j < qs.size(); ++j)
            REQUIRE(max_abs(commutator(qs[i], qs[j])) < 1e-13);
}

TEST_CASE("joint pair spectrum reproduces the even-parity truth table", "[spin]") {
    // Independent derivation: diagonalize q_x + 2 q_y + 4 q_z on one pair and
    // decode each eigenvalue as a binary-weighted (q_x, q_y, q_z) tuple. The
    // spectrum must be exactly {0, 3, 5, 6}, i.e. the tuples
    // (0,0,0), (1,1,0), (1,0,1), (0,1,1) - singlet plus the two-hot rows.
    const Matrix m = pair_q_operator(Axis::x) + 2.0 * pair_q_operator(Axis::y) +
                     4.0 * pair_q_operator(Axis::z);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    std::multiset<int> spectrum;
    for (int k = 0; k < 4; ++k)
        spectrum.insert(static_cast<int>(std::lround(es.eigenvalues()(k))));
    REQUIRE(spectrum == std::multiset<int>{0, 3, 5, 6});

    std::set<std::array<int, 3>> decoded;
    for (int v : spectrum) decoded.insert({v & 1, v >> 1 & 1, v >> 2 & 1});
    std::set<std::array<int, 3>> expected;
    for (int k = 0; k < 4; ++k) expected.insert(pair_q_tuple(static_cast<PairKind>(k)));
    REQUIRE(decoded == expected);
    for (const auto& tuple : decoded) {
        const int sum = tuple[0] + tuple[1] + tuple[2];
        REQUIRE((sum == 0 || sum == 2));
    }
}

TEST_CASE("pair basis states are simultaneous q eigenvectors", "[spin]") {
    for (int k = 0; k < 4; ++k) {
        const PairKind kind = static_cast<PairKind>(k);
        const Vector v = pair_basis_state(kind);
        REQUIRE(std::abs(v.norm() - 1.0) < 1e-15);
        const auto tuple = pair_q_tuple(kind);
        for (int a = 0; a < 3; ++a) {
            const Matrix q = pair_q_operator(static_cast<Axis>(a));
            REQUIRE((q * v - static_cast<double>(tuple[a]) * v).norm() < 1e-14);
        }
    }
}

TEST_CASE("pair q-basis matrix is unitary", "[spin]") {
    const Matrix b = pair_qbasis_matrix();
    REQUIRE(approx_equal(b.adjoint() * b, Matrix::Identity(4, 4), 1e-14));
}

TEST_CASE("exchange is the pauli dot-product form", "[spin]") {
    // X = (1 + sigma_1 . sigma_2) / 2, checked against the bare permutation.
    for (int t_count = 1; t_count <= 2; ++t_count) {
        for (int tau = 0; tau < t_count; ++tau) {
            const std::int64_t dim = hilbert_dim(t_count);
            Matrix dot = Matrix::Zero(dim, dim);
            for (Axis a : kAxes)
                dot += embed_pauli(t_count, tau, 0, a) * embed_pauli(t_count, tau, 1, a);
            const Matrix x_formula =
                0.5 * (Matrix::Identity(dim, dim) + dot);
            REQUIRE(approx_equal(exchange_operator(t_count, tau), x_formula, 1e-14));
        }
    }
}

TEST_CASE("exchange properties", "[spin]") {
    const int t_count = 2;
    const std::int64_t dim = hilbert_dim(t_count);
    for (int tau = 0; tau < t_count; ++tau) {
        const Matrix x = exchange_operator(t_count, tau);
        REQUIRE(is_hermitian(x));
        REQUIRE(approx_equal(x * x, Matrix::Identity(dim, dim), 1e-15));
    }
    // Singlet is odd, triplets are even under exchange.
    const Matrix x = exchange_operator(1, 0);
    REQUIRE((x * pair_basis_state(PairKind::singlet) + pair_basis_state(PairKind::singlet))
                .norm() < 1e-14);
    for (PairKind k : {PairKind::t_x, PairKind::t_y, PairKind::t_z})
        REQUIRE((x * pair_basis_state(k) - pair_basis_state(k)).norm() < 1e-14);
}

TEST_CASE("symmetrizer equals the product of exchange factors", "[spin]") {
    for (int t_count = 1; t_count <= 3; ++t_count) {
        const std::int64_t dim = hilbert_dim(t_count);
        Matrix product = Matrix::Identity(dim, dim);
        for (int tau = 0; tau < t_count; ++tau)
            product = product * 0.5 *
                      (Matrix::Identity(dim, dim) + exchange_operator(t_count, tau));
        REQUIRE(approx_equal(symmetrizer(t_count), product, 1e-14));
    }
}

TEST_CASE("symmetrizer is a projector of rank 3^T", "[spin]") {
    for (int t_count = 1; t_count <= 3; ++t_count) {
        const Matrix p = symmetrizer(t_count);
        REQUIRE(is_hermitian(p));
        REQUIRE(approx_equal(p * p, p, 1e-14));
        double expected_rank = 1;
        for (int tau = 0; tau < t_count; ++tau) expected_rank *= 3;
        REQUIRE(std::abs(p.trace().real() - expected_rank) < 1e-12);
        REQUIRE(std::abs(p.trace().imag()) < 1e-12);
    }
}

TEST_CASE("symmetrizer commutes with every node observable", "[spin]") {
    const int t_count = 2;
    const Matrix p = symmetrizer(t_count);
    for (int tau = 0; tau < t_count; ++tau) {
        for (Axis a : kAxes) {
            REQUIRE(max_abs(commutator(p, q_operator(t_count, tau, a))) < 1e-13);
            // total-spin components are exchange-symmetric as well
            REQUIRE(max_abs(commutator(p, spin_component(t_count, tau, a))) < 1e-13);
        }
    }
}

TEST_CASE("symmetrizer annihilates singlet factors", "[spin]") {
    const Vector s = pair_basis_state(PairKind::singlet);
    const Vector t = pair_basis_state(PairKind::t_z);
    Vector v(16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v(4 * i + j) = s(i) * t(j);
    REQUIRE((symmetrizer(2) * v).norm() < 1e-14);

    Vector w(16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) w(4 * i + j) = t(i) * t(j);
    REQUIRE((symmetrizer(2) * w - w).norm() < 1e-14);
}
