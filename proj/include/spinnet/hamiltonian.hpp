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

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "spinnet/network.hpp"
#include "spinnet/spin_algebra.hpp"

namespace spinnet {

// ---------------------------------------------------------------------------
// Deterministic seed derivation. Every random stream in the library is keyed
// by mixing identifying integers through splitmix64, so trajectory results
// are reproducible and independent of scheduling order.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x853c49e6748fea9bull;
    for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
    return h;
}

// Stream ids for the independent random purposes hanging off one trajectory.
enum : std::uint64_t { kStreamNoise = 0, kStreamInit = 1, kStreamMeasure = 2 };

// ---------------------------------------------------------------------------
// Annealing schedule for the stochastic fields.
// ---------------------------------------------------------------------------

enum class EnvelopeKind { linear, exponential };

// Gaussian field process parameters. The instantaneous field on each
// Cartesian component is an Ornstein-Uhlenbeck process with correlation time
// correlation_time, scaled to stationary standard deviation
// amplitude(t) = sigma0 * envelope(t). Fields are in energy/g units, times in
// 1/g units.
struct NoiseSchedule {
    double sigma0 = 1.0;
    EnvelopeKind envelope = EnvelopeKind::linear;
    double t_max = 10.0;          // linear: amplitude reaches zero here
    double decay_constant = 1.0;  // exponential: e-folding time
    double correlation_time = 1.0;
    std::uint64_t seed = 0;

    double amplitude(double t) const {
        switch (envelope) {
            case EnvelopeKind::linear:
                return t >= t_max ? 0.0 : sigma0 * (1.0 - t / t_max);
            case EnvelopeKind::exponential:
                return sigma0 * std::exp(-t / decay_constant);
        }
        return 0.0;
    }

    void validate() const {
        if (!(sigma0 >= 0.0)) throw std::invalid_argument("sigma0 must be >= 0");
        if (!(correlation_time > 0.0))
            throw std::invalid_argument("correlation_time must be > 0");
        if (envelope == EnvelopeKind::linear && !(t_max > 0.0))
            throw std::invalid_argument("linear envelope needs t_max > 0");
        if (envelope == EnvelopeKind::exponential && !(decay_constant > 0.0))
            throw std::invalid_argument("exponential envelope needs decay_constant > 0");
    }
};

// Strict parser for the schedule block: the envelope kind selects which end
// key (t_max vs decay_constant) is legal, anything unrecognized is an error.
inline NoiseSchedule noise_schedule_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("schedule block must be an object");
    NoiseSchedule s;
    for (const auto& item : j.items()) {
        const std::string& k = item.key();
        if (k != "sigma0" && k != "envelope" && k != "t_max" && k != "decay_constant" &&
            k != "correlation_time" && k != "seed")
            throw std::invalid_argument("unknown schedule key \"" + k + "\"");
    }
    if (j.contains("sigma0")) s.sigma0 = j["sigma0"].get<double>();
    if (j.contains("envelope")) {
        const std::string e = j["envelope"].get<std::string>();
        if (e == "linear") s.envelope = EnvelopeKind::linear;
        else if (e == "exponential") s.envelope = EnvelopeKind::exponential;
        else throw std::invalid_argument("envelope must be \"linear\" or \"exponential\"");
    }
    if (s.envelope == EnvelopeKind::linear) {
        if (j.contains("decay_constant"))
            throw std::invalid_argument("decay_constant is only valid with envelope=exponential");
        if (j.contains("t_max")) s.t_max = j["t_max"].get<double>();
    } else {
        if (j.contains("t_max"))
            throw std::invalid_argument("t_max is only valid with envelope=linear");
        if (j.contains("decay_constant")) s.decay_constant = j["decay_constant"].get<double>();
    }
    if (j.contains("correlation_time")) s.correlation_time = j["correlation_time"].get<double>();
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    s.validate();
    return s;
}

inline nlohmann::ordered_json noise_schedule_to_json(const NoiseSchedule& s) {
    nlohmann::ordered_json j;
    j["sigma0"] = s.sigma0;
    j["envelope"] = s.envelope == EnvelopeKind::linear ? "linear" : "exponential";
    if (s.envelope == EnvelopeKind::linear) j["t_max"] = s.t_max;
    else j["decay_constant"] = s.decay_constant;
    j["correlation_time"] = s.correlation_time;
    j["seed"] = s.seed;
    return j;
}

// ---------------------------------------------------------------------------
// Field samples and the Ornstein-Uhlenbeck process behind them.
// ---------------------------------------------------------------------------

enum class FieldMode { symmetric, asymmetric };

// Fields at one instant. Symmetric mode fills only `mean` (both protons of a
// triode see that field); asymmetric mode fills the per-proton fields and the
// derived componentwise mean.
struct FieldSample {
    FieldMode mode = FieldMode::symmetric;
    double t = 0.0;
    std::vector<Eigen::Vector3d> mean;
    std::vector<Eigen::Vector3d> proton1;  // asymmetric only
    std::vector<Eigen::Vector3d> proton2;  // asymmetric only

    int triode_count() const { return static_cast<int>(mean.size()); }

    // Reinterprets an asymmetric sample as the symmetric sample carrying the
    // pair's mean field; identity on symmetric samples.
    FieldSample to_symmetric_mean() const {
        FieldSample out;
        out.mode = FieldMode::symmetric;
        out.t = t;
        out.mean = mean;
        return out;
    }
};

// Private per-trajectory state of the noise process: one unit-variance OU
// component per (triode, axis) in symmetric mode, per (triode, proton, axis)
// in asymmetric mode, ordered triode-major then proton then axis.
struct OuProcess {
    FieldMode mode = FieldMode::symmetric;
    int t_count = 0;
    std::mt19937_64 rng;
    Eigen::VectorXd x;
    double t = 0.0;
    bool primed = false;

    OuProcess() = default;
    OuProcess(FieldMode m, int triodes, std::uint64_t seed)
        : mode(m), t_count(triodes), rng(seed),
          x(Eigen::VectorXd::Zero((m == FieldMode::symmetric ? 3 : 6) * triodes)) {}
};

// Advances the process to time t (exact OU transition kernel, so step size
// does not bias the statistics) and returns the scheduled fields there. The
// first call draws the stationary initial condition.
inline FieldSample sample_fields(const NoiseSchedule& sched, double t, OuProcess& state) {
    if (state.t_count <= 0) throw std::invalid_argument("noise process is unconfigured");
    if (t < state.t) throw std::invalid_argument("noise process cannot run backwards");

    std::normal_distribution<double> gauss(0.0, 1.0);
    if (!state.primed) {
        for (Eigen::Index i = 0; i < state.x.size(); ++i) state.x(i) = gauss(state.rng);
        state.primed = true;
        state.t = t;
    } else if (t > state.t) {
        const double decay = std::exp(-(t - state.t) / sched.correlation_time);
        const double kick = std::sqrt(1.0 - decay * decay);
        for (Eigen::Index i = 0; i < state.x.size(); ++i)
            state.x(i) = decay * state.x(i) + kick * gauss(state.rng);
        state.t = t;
    }

    const double amp = sched.amplitude(t);
    FieldSample out;
    out.mode = state.mode;
    out.t = t;
    out.mean.resize(state.t_count);
    if (state.mode == FieldMode::symmetric) {
        for (int tau = 0; tau < state.t_count; ++tau)
            out.mean[tau] = amp * state.x.segment<3>(3 * tau);
    } else {
        out.proton1.resize(state.t_count);
        out.proton2.resize(state.t_count);
        for (int tau = 0; tau < state.t_count; ++tau) {
            out.proton1[tau] = amp * state.x.segment<3>(6 * tau);
            out.proton2[tau] = amp * state.x.segment<3>(6 * tau + 3);
            out.mean[tau] = 0.5 * (out.proton1[tau] + out.proton2[tau]);
        }
    }
    return out;
}

// A noise realization tabulated on a fixed grid. Integrators read fields from
// the grid (piecewise constant per integration step), so runs with different
// step sizes can share one realization — the basis of the dt-convergence
// studies.
struct FieldPath {
    FieldMode mode = FieldMode::symmetric;
    double grid_dt = 0.0;
    std::vector<FieldSample> samples;

    const FieldSample& at_time(double t) const {
        if (samples.empty()) throw std::logic_error("empty field path");
        auto idx = static_cast<std::size_t>(std::floor(t / grid_dt + 1e-9));
        if (idx >= samples.size()) idx = samples.size() - 1;
        return samples[idx];
    }

    // The symmetric path carrying the per-triode mean fields; identity on
    // symmetric paths apart from the mode tag.
    FieldPath means() const {
        FieldPath out;
        out.mode = FieldMode::symmetric;
        out.grid_dt = grid_dt;
        out.samples.reserve(samples.size());
        for (const auto& s : samples) out.samples.push_back(s.to_symmetric_mean());
        return out;
    }
};

inline FieldPath make_field_path(const NoiseSchedule& sched, FieldMode mode, int t_count,
                                 double t_max, double grid_dt) {
    sched.validate();
    if (!(grid_dt > 0.0) || !(t_max > 0.0))
        throw std::invalid_argument("field path needs positive grid_dt and t_max");
    FieldPath path;
    path.mode = mode;
    path.grid_dt = grid_dt;
    OuProcess state(mode, t_count, sched.seed);
    const auto n = static_cast<std::size_t>(std::ceil(t_max / grid_dt - 1e-9)) + 1;
    path.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        path.samples.push_back(sample_fields(sched, static_cast<double>(i) * grid_dt, state));
    return path;
}

// ---------------------------------------------------------------------------
// Operator assembly.
// ---------------------------------------------------------------------------

namespace detail {
inline const Matrix& cached_pair_pauli(int proton, Axis a) {
    static const std::array<Matrix, 6> blocks = [] {
        std::array<Matrix, 6> b;
        for (int p = 0; p < 2; ++p)
            for (int ax = 0; ax < 3; ++ax)
                b[3 * p + ax] = pair_pauli(p, static_cast<Axis>(ax));
        return b;
    }();
    return blocks[3 * proton + static_cast<int>(a)];
}
}  // namespace detail

// Immutable bundle of the network's static operators: the wire frustration
// Hamiltonian, the exchange symmetrizer, and node observables. Construction
// is eager; instances are safe to share across trajectory workers.
class SpinSpace {
  public:
    SpinSpace(BooleanNetwork network, double g = 1.0)
        : network_(std::move(network)), g_(g) {
        if (!(g > 0.0)) throw std::invalid_argument("g must be > 0");
        t_count_ = network_.triode_count();
        dim_ = hilbert_dim(t_count_);
        symmetrizer_ = spinnet::symmetrizer(t_count_);
        h_network_ = Matrix::Zero(dim_, dim_);
        for (const auto& w : network_.wires()) {
            const Matrix d = q_node(w.first) - q_node(w.second);
            h_network_ += g_ * d * d;
        }
    }

    const BooleanNetwork& network() const { return network_; }
    double g() const { return g_; }
    int t_count() const { return t_count_; }
    std::int64_t dim() const { return dim_; }

    // H_N = g * sum over wires of (q_i - q_j)^2; zero exactly on encodings of
    // wire-satisfying assignments.
    const Matrix& network_hamiltonian() const { return h_network_; }

    // Projector onto the all-triplet sector, rank 3^T.
    const Matrix& symmetrizer() const { return symmetrizer_; }

    // The node observable q for a 1-based node id, embedded in the full space.
    Matrix q_node(int node_id) const {
        const NodeSite site = network_.site_of(node_id);
        return embed_pair_operator(t_count_, site.triode,
                                   pair_q_operator(static_cast<Axis>(site.axis)));
    }

  private:
    BooleanNetwork network_;
    double g_;
    int t_count_;
    std::int64_t dim_;
    Matrix h_network_;
    Matrix symmetrizer_;
};

inline const Matrix& wire_hamiltonian(const SpinSpace& space) {
    return space.network_hamiltonian();
}

// g * sum_tau B_tau . (sigma_{tau,1} + sigma_{tau,2}); commutes with every
// exchange operator because both protons see the same field.
inline Matrix coupling_symmetric(const SpinSpace& space, const FieldSample& fields) {
    if (fields.mode != FieldMode::symmetric)
        throw std::invalid_argument("coupling_symmetric needs a symmetric sample "
                                    "(use to_symmetric_mean() for an asymmetric one)");
    if (fields.triode_count() != space.t_count())
        throw std::invalid_argument("field sample / network size mismatch");
    Matrix h = Matrix::Zero(space.dim(), space.dim());
    for (int tau = 0; tau < space.t_count(); ++tau) {
        Matrix block = Matrix::Zero(4, 4);
        for (int ax = 0; ax < 3; ++ax) {
            const Axis a = static_cast<Axis>(ax);
            block += fields.mean[tau](ax) *
                     (detail::cached_pair_pauli(0, a) + detail::cached_pair_pauli(1, a));
        }
        add_pair_operator(h, space.t_count(), tau, block, space.g());
    }
    return h;
}

// g * sum_tau [B_{tau,1} . sigma_{tau,1} + B_{tau,2} . sigma_{tau,2}]; the
// per-proton fields break exchange symmetry.
inline Matrix coupling_asymmetric(const SpinSpace& space, const FieldSample& fields) {
    if (fields.mode != FieldMode::asymmetric)
        throw std::invalid_argument("coupling_asymmetric needs an asymmetric sample");
    if (fields.triode_count() != space.t_count())
        throw std::invalid_argument("field sample / network size mismatch");
    Matrix h = Matrix::Zero(space.dim(), space.dim());
    for (int tau = 0; tau < space.t_count(); ++tau) {
        Matrix block = Matrix::Zero(4, 4);
        for (int ax = 0; ax < 3; ++ax) {
            const Axis a = static_cast<Axis>(ax);
            block += fields.proton1[tau](ax) * detail::cached_pair_pauli(0, a) +
                     fields.proton2[tau](ax) * detail::cached_pair_pauli(1, a);
        }
        add_pair_operator(h, space.t_count(), tau, block, space.g());
    }
    return h;
}

// H(t) = H_N + H_I(t) for the sample's mode. The bath's self-energy acts only
// on bath degrees of freedom, which the classical field process replaces, so
// no third term appears here.
inline Matrix total_hamiltonian(const SpinSpace& space, const FieldSample& fields) {
    Matrix h = space.network_hamiltonian();
    h += fields.mode == FieldMode::symmetric ? coupling_symmetric(space, fields)
                                             : coupling_asymmetric(space, fields);
    return h;
}

}  // namespace spinnet
