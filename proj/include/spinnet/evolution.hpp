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
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "spinnet/hamiltonian.hpp"
#include "spinnet/observables.hpp"

namespace spinnet {

enum class Regime { actual, comparison, projected };

inline std::string regime_name(Regime r) {
    switch (r) {
        case Regime::actual: return "actual";
        case Regime::comparison: return "comparison";
        case Regime::projected: return "projected";
    }
    return "?";
}

inline Regime regime_from_name(const std::string& name) {
    if (name == "actual") return Regime::actual;
    if (name == "comparison") return Regime::comparison;
    if (name == "projected") return Regime::projected;
    throw std::invalid_argument("unknown regime \"" + name + "\"");
}

// ---------------------------------------------------------------------------
// Initial states. All three kinds live in the triplet sector, mirroring a
// network prepared with every gate intact.
// ---------------------------------------------------------------------------

enum class InitKind { random_symmetric, uniform_triplet, basis_symmetric };

inline InitKind init_kind_from_name(const std::string& name) {
    if (name == "random_symmetric") return InitKind::random_symmetric;
    if (name == "uniform_triplet") return InitKind::uniform_triplet;
    if (name == "basis_symmetric") return InitKind::basis_symmetric;
    throw std::invalid_argument("unknown init kind \"" + name + "\"");
}

inline std::string init_kind_name(InitKind k) {
    switch (k) {
        case InitKind::random_symmetric: return "random_symmetric";
        case InitKind::uniform_triplet: return "uniform_triplet";
        case InitKind::basis_symmetric: return "basis_symmetric";
    }
    return "?";
}

inline Vector initial_state(const SpinSpace& space, InitKind kind, std::uint64_t seed = 0) {
    const std::int64_t dim = space.dim();
    const int t_count = space.t_count();
    switch (kind) {
        case InitKind::random_symmetric: {
            // Complex-Gaussian vector projected into ran(P): over seeds this
            // samples the maximally mixed symmetric-sector ensemble.
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> gauss;
            Vector v(dim);
            for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex{gauss(rng), gauss(rng)};
            v = space.symmetrizer() * v;
            const double n = v.norm();
            if (n < 1e-12) throw std::runtime_error("degenerate random draw");
            return v / n;
        }
        case InitKind::uniform_triplet: {
            Vector pair = (pair_basis_state(PairKind::t_x) + pair_basis_state(PairKind::t_y) +
                           pair_basis_state(PairKind::t_z)) /
                          std::sqrt(3.0);
            Vector v = Vector::Ones(1);
            for (int tau = 0; tau < t_count; ++tau) {
                Vector next(v.size() * 4);
                for (Eigen::Index i = 0; i < v.size(); ++i)
                    next.segment<4>(4 * i) = v(i) * pair;
                v = std::move(next);
            }
            return v;
        }
        case InitKind::basis_symmetric: {
            // One uniformly drawn triplet product basis state.
            std::mt19937_64 rng(seed);
            std::uniform_int_distribution<int> pick(1, 3);  // t_x, t_y, t_z
            Vector v = Vector::Ones(1);
            for (int tau = 0; tau < t_count; ++tau) {
                const Vector pair = pair_basis_state(static_cast<PairKind>(pick(rng)));
                Vector next(v.size() * 4);
                for (Eigen::Index i = 0; i < v.size(); ++i)
                    next.segment<4>(4 * i) = v(i) * pair;
                v = std::move(next);
            }
            return v;
        }
    }
    throw std::invalid_argument("bad init kind");
}

// ---------------------------------------------------------------------------
// Single exact step: |psi'> = exp(-i H dt) |psi| via eigendecomposition.
// Unitary at any dt, so norm and the symmetric sector survive long runs; the
// first-order slice update is recovered as dt -> 0.
// ---------------------------------------------------------------------------

inline Vector step(const Vector& state, const Matrix& h, double dt) {
    if (!is_hermitian(h, 1e-12))
        throw std::invalid_argument("step requires a Hermitian generator");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const auto& v = es.eigenvectors();
    Vector phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(Complex{0.0, -es.eigenvalues()(i) * dt});
    return v * phases.asDiagonal() * (v.adjoint() * state);
}

// ---------------------------------------------------------------------------
// Trajectory integration.
// ---------------------------------------------------------------------------

struct IntegratorConfig {
    double dt = 1e-3;
    double t_max = 1.0;
    Regime regime = Regime::actual;
    int record_stride = 1;        // steps between observable snapshots
    int projection_stride = 1;    // projected regime: steps per projection slice
    double sample_grid_dt = 0.0;  // noise tabulation grid; 0 means "= dt"
    bool matched_fields = false;  // actual regime driven by an asymmetric
                                  // realization's mean fields (twin studies)

    double field_grid() const { return sample_grid_dt > 0.0 ? sample_grid_dt : dt; }

    void validate(const SpinSpace& space, const NoiseSchedule& sched) const {
        if (!(dt > 0.0) || !(dt <= t_max))
            throw std::invalid_argument("need 0 < dt <= t_max");
        if (record_stride < 1 || projection_stride < 1)
            throw std::invalid_argument("strides must be >= 1");
        // Spectral-radius bound: wires contribute g each, each proton spin
        // contributes |B| <= 3 sigma_B per axis through the coupling.
        const double w = space.network().wire_count();
        const double bound = space.g() *
                             (w + 6.0 * space.t_count() * 3.0 * sched.sigma0);
        if (dt * bound > 0.1)
            throw std::invalid_argument(
                "dt too coarse for the spectral bound: dt * " + std::to_string(bound) +
                " > 0.1");
        if (sample_grid_dt > 0.0) {
            const double ratio = dt / sample_grid_dt;
            if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0 - 1e-9)
                throw std::invalid_argument(
                    "dt must be a positive integer multiple of sample_grid_dt");
        }
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ProbabilityDecomposition> probs;
    std::vector<double> energy;
    std::vector<double> energy_frustrated;
    std::vector<double> weights;  // cumulative survival weight at each snapshot
    double survival_weight = 1.0;
    bool extinguished = false;
    Vector terminal_state;
};

// Integrates one trajectory against a pre-tabulated noise realization. The
// path's mode must match the regime: symmetric for actual, asymmetric for
// comparison and projected.
inline Trajectory evolve_on_path(const SpinSpace& space, const ProjectorSet& ps,
                                 const IntegratorConfig& cfg, const FieldPath& path,
                                 const Vector& init) {
    const FieldMode want = cfg.regime == Regime::actual ? FieldMode::symmetric
                                                        : FieldMode::asymmetric;
    if (path.mode != want)
        throw std::invalid_argument("field path mode does not match the regime");
    if (std::abs(init.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("initial state must be normalized");

    const auto n_steps = static_cast<std::int64_t>(std::round(cfg.t_max / cfg.dt));
    Trajectory traj;
    Vector psi = init;

    const auto record = [&](std::int64_t step_index) {
        const double t = static_cast<double>(step_index) * cfg.dt;
        traj.times.push_back(t);
        traj.probs.push_back(decompose(psi, ps, t));
        const auto e = network_energy(psi, space, ps);
        traj.energy.push_back(e.total);
        traj.energy_frustrated.push_back(e.frustrated);
        traj.weights.push_back(traj.survival_weight);
    };

    record(0);
    for (std::int64_t i = 0; i < n_steps; ++i) {
        if (!traj.extinguished) {
            const double t = static_cast<double>(i) * cfg.dt;
            const Matrix h = total_hamiltonian(space, path.at_time(t));
            psi = step(psi, h, cfg.dt);
            if (cfg.regime == Regime::projected && (i + 1) % cfg.projection_stride == 0) {
                const Vector projected = space.symmetrizer() * psi;
                const double norm_sq = projected.squaredNorm();
                traj.survival_weight *= norm_sq;
                if (norm_sq < 1e-12 || traj.survival_weight < 1e-12) {
                    traj.survival_weight = 0.0;
                    traj.extinguished = true;  // state frozen, weight zero from here
                } else {
                    psi = projected / std::sqrt(norm_sq);
                }
            }
        }
        if ((i + 1) % cfg.record_stride == 0 || i + 1 == n_steps) record(i + 1);
    }
    traj.terminal_state = psi;
    return traj;
}

// Draws the noise realization for the regime and integrates. matched_fields
// makes the actual regime consume the mean fields of the asymmetric
// realization this seed would produce — the twin construction behind the
// continuous-projection studies.
inline Trajectory evolve(const SpinSpace& space, const ProjectorSet& ps,
                         const IntegratorConfig& cfg, const NoiseSchedule& sched,
                         const Vector& init) {
    cfg.validate(space, sched);
    FieldPath path;
    if (cfg.regime == Regime::actual && cfg.matched_fields) {
        path = make_field_path(sched, FieldMode::asymmetric, space.t_count(), cfg.t_max,
                               cfg.field_grid())
                   .means();
    } else {
        const FieldMode mode = cfg.regime == Regime::actual ? FieldMode::symmetric
                                                            : FieldMode::asymmetric;
        path = make_field_path(sched, mode, space.t_count(), cfg.t_max, cfg.field_grid());
    }
    return evolve_on_path(space, ps, cfg, path, init);
}

// ---------------------------------------------------------------------------
// Ensembles: the bath trace realized as an average over noise realizations.
// ---------------------------------------------------------------------------

struct EnsembleResult {
    std::vector<double> times;
    std::vector<double> p0, pF, pV, energy, weight;  // survival-weighted averages
    std::vector<Trajectory> trajectories;            // per-trajectory series
    std::map<std::string, std::int64_t> measurement_counts;  // terminal samples
};

// Deterministic given (master_seed, n_traj, cfg, sched): per-trajectory seeds
// are mixed from the master seed and the trajectory index, and the reduction
// is an ordered fold over that index.
inline EnsembleResult ensemble_run(const SpinSpace& space, const ProjectorSet& ps,
                                   const IntegratorConfig& cfg, const NoiseSchedule& sched,
                                   InitKind init_kind, int n_traj, std::uint64_t master_seed,
                                   int measurements_per_trajectory = 1) {
    if (n_traj < 1) throw std::invalid_argument("need at least one trajectory");
    cfg.validate(space, sched);

    EnsembleResult out;
    const MeasurementSampler sampler(space.network());
    for (int traj_index = 0; traj_index < n_traj; ++traj_index) {
        NoiseSchedule traj_sched = sched;
        traj_sched.seed = mix_seed({master_seed, sched.seed,
                                    static_cast<std::uint64_t>(traj_index), kStreamNoise});
        const Vector init = initial_state(
            space, init_kind,
            mix_seed({master_seed, sched.seed, static_cast<std::uint64_t>(traj_index),
                      kStreamInit}));
        Trajectory traj = evolve(space, ps, cfg, traj_sched, init);

        if (measurements_per_trajectory > 0 && !traj.extinguished) {
            std::mt19937_64 rng(mix_seed({master_seed, sched.seed,
                                          static_cast<std::uint64_t>(traj_index),
                                          kStreamMeasure}));
            for (int m = 0; m < measurements_per_trajectory; ++m)
                out.measurement_counts[sampler.sample(traj.terminal_state, rng).to_string()] +=
                    1;
        }
        out.trajectories.push_back(std::move(traj));
    }

    const auto& first = out.trajectories.front();
    const std::size_t n_snap = first.times.size();
    out.times = first.times;
    out.p0.assign(n_snap, 0.0);
    out.pF.assign(n_snap, 0.0);
    out.pV.assign(n_snap, 0.0);
    out.energy.assign(n_snap, 0.0);
    out.weight.assign(n_snap, 0.0);
    for (std::size_t s = 0; s < n_snap; ++s) {
        double w_sum = 0;
        for (const auto& traj : out.trajectories) {
            const double w = traj.weights[s];
            w_sum += w;
            out.p0[s] += w * traj.probs[s].p0;
            out.pF[s] += w * traj.probs[s].pF;
            out.pV[s] += w * traj.probs[s].pV;
            out.energy[s] += w * traj.energy[s];
        }
        out.weight[s] = w_sum / n_traj;
        if (w_sum > 0) {
            out.p0[s] /= w_sum;
            out.pF[s] /= w_sum;
            out.pV[s] /= w_sum;
            out.energy[s] /= w_sum;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Convergence study for the continuous-projection theorem: one asymmetric
// realization tabulated on a fine shared grid drives, per dt, a projected
// trajectory and its mean-field actual twin; the terminal-state distance
// shrinks linearly in dt.
// ---------------------------------------------------------------------------

struct ConvergencePoint {
    double dt = 0.0;
    double distance = 0.0;
};

inline std::vector<ConvergencePoint> projection_convergence_study(
    const SpinSpace& space, const ProjectorSet& ps, const NoiseSchedule& sched,
    const Vector& init, const std::vector<double>& dts, double t_max, double grid_dt) {
    const FieldPath asym =
        make_field_path(sched, FieldMode::asymmetric, space.t_count(), t_max, grid_dt);
    const FieldPath sym = asym.means();

    std::vector<ConvergencePoint> points;
    for (double dt : dts) {
        IntegratorConfig proj_cfg;
        proj_cfg.dt = dt;
        proj_cfg.t_max = t_max;
        proj_cfg.regime = Regime::projected;
        proj_cfg.record_stride = 1 << 20;  // terminal state only
        proj_cfg.sample_grid_dt = grid_dt;
        proj_cfg.validate(space, sched);

        IntegratorConfig act_cfg = proj_cfg;
        act_cfg.regime = Regime::actual;

        const Trajectory projected = evolve_on_path(space, ps, proj_cfg, asym, init);
        const Trajectory actual = evolve_on_path(space, ps, act_cfg, sym, init);
        ConvergencePoint p;
        p.dt = dt;
        p.distance = (projected.terminal_state - actual.terminal_state).norm();
        points.push_back(p);
    }
    return points;
}

// Least-squares slope of log(distance) versus log(dt): the measured
// convergence order.
inline double fitted_order(const std::vector<ConvergencePoint>& points) {
    if (points.size() < 2) throw std::invalid_argument("need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(points.size());
    for (const auto& p : points) {
        if (!(p.distance > 0.0))
            throw std::invalid_argument("zero distance: order undefined");
        const double x = std::log(p.dt), y = std::log(p.distance);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace spinnet
