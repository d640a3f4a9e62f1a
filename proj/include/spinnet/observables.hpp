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

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "spinnet/hamiltonian.hpp"
#include "spinnet/network.hpp"
#include "spinnet/spin_algebra.hpp"

namespace spinnet {

// ---------------------------------------------------------------------------
// The three-way decomposition of the state space:
//   Pi0 - triodes and wires all satisfied (solutions),
//   PiF - triodes satisfied, at least one wire frustrated,
//   PiV - at least one triode violated (outside the triplet sector).
// ---------------------------------------------------------------------------

struct ProjectorSet {
    Matrix Pi0;
    Matrix PiF;
    Matrix PiV;
};

inline ProjectorSet projector_set(const SpinSpace& space) {
    const std::int64_t dim = space.dim();
    Matrix pi_sat = Matrix::Identity(dim, dim);
    for (const auto& w : space.network().wires()) {
        const Matrix d = space.q_node(w.first) - space.q_node(w.second);
        pi_sat = pi_sat * (Matrix::Identity(dim, dim) - d * d);
    }
    ProjectorSet ps;
    const Matrix& p = space.symmetrizer();
    ps.Pi0 = p * pi_sat;
    ps.PiF = p * (Matrix::Identity(dim, dim) - pi_sat);
    ps.PiV = Matrix::Identity(dim, dim) - p;
    return ps;
}

struct ProbabilityDecomposition {
    double t = 0.0;
    double p0 = 0.0;
    double pF = 0.0;
    double pV = 0.0;
};

inline ProbabilityDecomposition decompose(const Vector& state, const ProjectorSet& ps,
                                          double t = 0.0) {
    ProbabilityDecomposition d;
    d.t = t;
    d.p0 = std::real(state.dot(ps.Pi0 * state));
    d.pF = std::real(state.dot(ps.PiF * state));
    d.pV = std::real(state.dot(ps.PiV * state));
    return d;
}

inline ProbabilityDecomposition decompose(const Matrix& density, const ProjectorSet& ps,
                                          double t = 0.0) {
    ProbabilityDecomposition d;
    d.t = t;
    d.p0 = std::real((ps.Pi0 * density).trace());
    d.pF = std::real((ps.PiF * density).trace());
    d.pV = std::real((ps.PiV * density).trace());
    return d;
}

// <H_N> plus the frustrated-sector restriction Tr(PiF rho PiF H_N). The two
// coincide whenever the state has no triode-violating component, since Pi0
// annihilates H_N.
struct EnergyReport {
    double total = 0.0;
    double frustrated = 0.0;
};

inline EnergyReport network_energy(const Vector& state, const SpinSpace& space,
                                   const ProjectorSet& ps) {
    EnergyReport e;
    e.total = std::real(state.dot(space.network_hamiltonian() * state));
    const Vector f = ps.PiF * state;
    e.frustrated = std::real(f.dot(space.network_hamiltonian() * f));
    return e;
}

inline EnergyReport network_energy(const Matrix& density, const SpinSpace& space,
                                   const ProjectorSet& ps) {
    EnergyReport e;
    e.total = std::real((space.network_hamiltonian() * density).trace());
    e.frustrated = std::real((space.network_hamiltonian() * ps.PiF * density * ps.PiF).trace());
    return e;
}

// ---------------------------------------------------------------------------
// Assignment encoding: a Boolean assignment maps to the product of per-pair
// joint q-eigenstates whose tuples match the per-triode node values. Only
// even-parity tuples exist in the spectrum, so odd-parity assignments have no
// encoding.
// ---------------------------------------------------------------------------

inline PairKind pair_kind_for_tuple(const std::array<int, 3>& tuple) {
    for (int k = 0; k < 4; ++k) {
        const auto kind = static_cast<PairKind>(k);
        if (pair_q_tuple(kind) == tuple) return kind;
    }
    throw std::invalid_argument("tuple (" + std::to_string(tuple[0]) + "," +
                                std::to_string(tuple[1]) + "," + std::to_string(tuple[2]) +
                                ") is odd-parity and has no pair eigenstate");
}

inline Vector encode_assignment(const BooleanNetwork& network, const Assignment& a) {
    if (static_cast<int>(a.bits.size()) != network.node_count())
        throw std::invalid_argument("assignment length does not match the network");
    Vector state = Vector::Ones(1);
    for (const auto& triode : network.triodes()) {
        const std::array<int, 3> tuple{a.bit(triode[0]), a.bit(triode[1]), a.bit(triode[2])};
        const Vector pair = pair_basis_state(pair_kind_for_tuple(tuple));
        Vector next(state.size() * 4);
        for (Eigen::Index i = 0; i < state.size(); ++i)
            next.segment<4>(4 * i) = state(i) * pair;
        state = std::move(next);
    }
    return state;
}

// ---------------------------------------------------------------------------
// Terminal measurement of all node variables. The q operators commute, so
// one projective measurement in the joint eigenbasis (the per-pair q-basis
// tensored over triodes) reproduces sequential per-node statistics.
// ---------------------------------------------------------------------------

class MeasurementSampler {
  public:
    explicit MeasurementSampler(const BooleanNetwork& network)
        : network_(network), t_count_(network.triode_count()) {
        Matrix basis = Matrix::Identity(1, 1);
        for (int tau = 0; tau < t_count_; ++tau) basis = kron(basis, pair_qbasis_matrix());
        adjoint_basis_ = basis.adjoint();
    }

    // Born-rule sample of the joint q eigenvalue tuple, decoded to node bits.
    Assignment sample(const Vector& state, std::mt19937_64& rng) const {
        if (state.size() != adjoint_basis_.rows())
            throw std::invalid_argument("state dimension does not match the network");
        const Vector amps = adjoint_basis_ * state;
        std::vector<double> weights(amps.size());
        for (Eigen::Index i = 0; i < amps.size(); ++i) weights[i] = std::norm(amps(i));
        std::discrete_distribution<std::int64_t> pick(weights.begin(), weights.end());
        return decode(pick(rng));
    }

    // Maps a joint-eigenbasis index (base-4 digits, first triode most
    // significant) to the corresponding Boolean assignment.
    Assignment decode(std::int64_t index) const {
        Assignment a;
        a.bits.assign(3 * t_count_, 0);
        for (int tau = t_count_ - 1; tau >= 0; --tau) {
            const auto kind = static_cast<PairKind>(index & 3);
            index >>= 2;
            const auto tuple = pair_q_tuple(kind);
            const Triode& triode = network_.triodes()[tau];
            for (int axis = 0; axis < 3; ++axis)
                a.bits[triode[axis] - 1] = static_cast<std::uint8_t>(tuple[axis]);
        }
        return a;
    }

  private:
    BooleanNetwork network_;
    int t_count_;
    Matrix adjoint_basis_;
};

inline Assignment measure(const Vector& state, const BooleanNetwork& network,
                          std::mt19937_64& rng) {
    return MeasurementSampler(network).sample(state, rng);
}

// Aggregated measurement statistics with the classical oracle's verdict per
// sampled assignment: map from bitstring to count, triode-gate solution flag,
// and parity-gate solution flag. Keys serialize sorted for determinism.
inline nlohmann::json measurement_statistics_json(
    const std::map<std::string, std::int64_t>& counts, const BooleanNetwork& network) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [bits, count] : counts) {
        const Assignment a = Assignment::from_string(bits);
        out[bits] = {{"count", count},
                     {"solution", satisfies(network, a, GateKind::triode)},
                     {"xor_solution", satisfies(network, a, GateKind::xor_gate)}};
    }
    return out;
}

}  // namespace spinnet
