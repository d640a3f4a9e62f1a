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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinnet/evolution.hpp"

namespace spinnet {

// ---------------------------------------------------------------------------
// Frustration decay rate: log-linear least squares on p_F.
// ---------------------------------------------------------------------------

struct RateFit {
    double k = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

// Fits -log pF = a + k t over samples with t in [t_lo, t_hi]. Requires at
// least two points with strictly positive pF on the window.
inline RateFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& pF,
                              double t_lo, double t_hi) {
    if (times.size() != pF.size()) throw std::invalid_argument("series length mismatch");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo - 1e-12 || times[i] > t_hi + 1e-12) continue;
        if (!(pF[i] > 0.0))
            throw std::invalid_argument("pF must be positive on the fit window");
        xs.push_back(times[i]);
        ys.push_back(-std::log(pF[i]));
    }
    if (xs.size() < 2) throw std::invalid_argument("fit window holds fewer than two samples");

    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-30) throw std::invalid_argument("degenerate time column");

    RateFit fit;
    fit.k = (n * sxy - sx * sy) / denom;
    fit.t_lo = xs.front();
    fit.t_hi = xs.back();
    fit.points = static_cast<int>(xs.size());
    const double ss_tot = syy - sy * sy / n;
    const double ss_res = ss_tot - fit.k * (sxy - sx * sy / n);
    fit.r_squared = ss_tot > 1e-30 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    return fit;
}

// The fit window where the small-p0 approximation holds: from the start of
// the trace until p0 first reaches the gate (default 0.3).
inline std::pair<double, double> default_rate_window(const std::vector<double>& times,
                                                     const std::vector<double>& p0,
                                                     double gate = 0.3) {
    if (times.size() != p0.size() || times.empty())
        throw std::invalid_argument("bad trace for window selection");
    double t_hi = times.back();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (p0[i] >= gate) {
            if (i == 0) throw std::invalid_argument("p0 exceeds the gate from the start");
            t_hi = times[i - 1];
            break;
        }
    }
    return {times.front(), t_hi};
}

// ---------------------------------------------------------------------------
// Nucleation: the first persistent appearance of solution probability above
// a tiny baseline.
// ---------------------------------------------------------------------------

struct Nucleation {
    bool found = false;
    double t_h = 0.0;
    double baseline = 0.0;
    std::size_t index = 0;
    int persistence = 3;
};

// baseline <= 0 selects the default max(2^-Q, initial p0). t_h is the time of
// the first snapshot in the first run of `persistence` consecutive snapshots
// with p0 strictly above the baseline.
inline Nucleation detect_nucleation(const std::vector<double>& times,
                                    const std::vector<double>& p0, int q_count,
                                    double baseline = 0.0, int persistence = 3) {
    if (times.size() != p0.size() || times.empty())
        throw std::invalid_argument("bad trace for nucleation detection");
    if (persistence < 1) throw std::invalid_argument("persistence must be >= 1");
    Nucleation n;
    n.persistence = persistence;
    n.baseline = baseline > 0.0
                     ? baseline
                     : std::max(std::pow(2.0, -static_cast<double>(q_count)), p0.front());
    int run = 0;
    for (std::size_t i = 0; i < p0.size(); ++i) {
        if (p0[i] > n.baseline) {
            if (++run >= persistence) {
                n.found = true;
                n.index = i + 1 - static_cast<std::size_t>(persistence);
                n.t_h = times[n.index];
                return n;
            }
        } else {
            run = 0;
        }
    }
    return n;  // found = false: no nucleation inside the horizon
}

// ---------------------------------------------------------------------------
// Exponential growth prediction for the solution population.
// ---------------------------------------------------------------------------

struct GrowthPrediction {
    double p0 = 0.0;
    bool beyond_validity = false;  // prediction left the small-p0 regime (> 0.3)
};

inline GrowthPrediction predict_growth(double p0_at_th, double k, double dT) {
    if (!(p0_at_th > 0.0)) throw std::invalid_argument("p0 at nucleation must be positive");
    GrowthPrediction g;
    g.p0 = p0_at_th * std::exp(k * dT);
    g.beyond_validity = g.p0 > 0.3;
    return g;
}

// ---------------------------------------------------------------------------
// Variable-rate composition: slicewise exponential factors compose exactly
// into the mean-rate factor.
// ---------------------------------------------------------------------------

struct VariableRateReport {
    bool consistent = false;
    double mean_rate = 0.0;
    double product_factor = 0.0;
    double mean_factor = 0.0;
    double relative_residual = 0.0;
};

inline VariableRateReport variable_rate_check(const std::vector<double>& rates,
                                              const std::vector<double>& lengths,
                                              double tolerance = 1e-12) {
    if (rates.size() != lengths.size() || rates.empty())
        throw std::invalid_argument("rates and slice lengths must pair up");
    double total = 0, weighted = 0, log_product = 0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (!(lengths[i] > 0.0)) throw std::invalid_argument("slice lengths must be positive");
        total += lengths[i];
        weighted += rates[i] * lengths[i];
        log_product += rates[i] * lengths[i];
    }
    VariableRateReport r;
    r.mean_rate = weighted / total;
    r.product_factor = std::exp(log_product);
    r.mean_factor = std::exp(r.mean_rate * total);
    r.relative_residual = std::abs(r.product_factor - r.mean_factor) /
                          std::max(r.mean_factor, 1e-300);
    r.consistent = r.relative_residual <= tolerance;
    return r;
}

// ---------------------------------------------------------------------------
// Bootstrap confidence intervals over trajectories.
// ---------------------------------------------------------------------------

struct BootstrapCI {
    double lo = std::numeric_limits<double>::quiet_NaN();
    double hi = std::numeric_limits<double>::quiet_NaN();
};

// Per-trajectory observable series for resampling: outer index trajectory,
// inner index snapshot; weights are the projected-regime survival weights
// (all ones in the unitary regimes).
struct EnsembleTraces {
    std::vector<double> times;
    std::vector<std::vector<double>> p0;
    std::vector<std::vector<double>> pF;
    std::vector<std::vector<double>> weights;

    static EnsembleTraces from_result(const EnsembleResult& result) {
        EnsembleTraces t;
        t.times = result.times;
        for (const auto& traj : result.trajectories) {
            t.p0.emplace_back();
            t.pF.emplace_back();
            t.weights.push_back(traj.weights);
            for (const auto& p : traj.probs) {
                t.p0.back().push_back(p.p0);
                t.pF.back().push_back(p.pF);
            }
        }
        return t;
    }

    std::size_t trajectory_count() const { return p0.size(); }

    // Survival-weighted average of one observable over a subset of
    // trajectory indices (with repetitions, as drawn by the bootstrap).
    std::vector<double> averaged(const std::vector<std::vector<double>>& series,
                                 const std::vector<std::size_t>& picks) const {
        std::vector<double> out(times.size(), 0.0);
        for (std::size_t s = 0; s < times.size(); ++s) {
            double w_sum = 0, acc = 0;
            for (std::size_t idx : picks) {
                const double w = weights[idx][s];
                w_sum += w;
                acc += w * series[idx][s];
            }
            out[s] = w_sum > 0 ? acc / w_sum : 0.0;
        }
        return out;
    }

    std::vector<std::size_t> all_indices() const {
        std::vector<std::size_t> idx(trajectory_count());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        return idx;
    }
};

constexpr std::uint64_t kBootstrapSeed = 0x0b001'57a9ull;
constexpr int kBootstrapResamples = 1000;

namespace detail {
inline BootstrapCI percentile_interval(std::vector<double> estimates) {
    BootstrapCI ci;
    if (estimates.size() < 10) return ci;
    std::sort(estimates.begin(), estimates.end());
    const auto n = estimates.size();
    ci.lo = estimates[static_cast<std::size_t>(0.025 * (n - 1))];
    ci.hi = estimates[static_cast<std::size_t>(0.975 * (n - 1))];
    return ci;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// One-stop trace analysis: point estimates plus bootstrap intervals, shaped
// for the report files.
// ---------------------------------------------------------------------------

struct AnalysisReport {
    int q = 0;
    int trajectories = 0;
    double threshold = 0.3;
    double baseline = 0.0;
    std::optional<double> k;
    BootstrapCI k_ci;
    double r_squared = 0.0;
    std::optional<double> t_h;
    BootstrapCI t_h_ci;
    std::optional<double> dT_threshold;  // time from t_h to p0 >= threshold
};

inline AnalysisReport analyze_traces(const EnsembleTraces& traces, int q_count,
                                     double threshold = 0.3,
                                     int resamples = kBootstrapResamples,
                                     std::uint64_t seed = kBootstrapSeed) {
    if (traces.trajectory_count() == 0) throw std::invalid_argument("no trajectories");
    AnalysisReport report;
    report.q = q_count;
    report.trajectories = static_cast<int>(traces.trajectory_count());
    report.threshold = threshold;

    const auto full = traces.all_indices();
    const std::vector<double> mean_p0 = traces.averaged(traces.p0, full);
    const std::vector<double> mean_pF = traces.averaged(traces.pF, full);

    const Nucleation nuc = detect_nucleation(traces.times, mean_p0, q_count);
    report.baseline = nuc.baseline;
    if (nuc.found) {
        report.t_h = nuc.t_h;
        for (std::size_t s = nuc.index; s < traces.times.size(); ++s) {
            if (mean_p0[s] >= threshold) {
                report.dT_threshold = traces.times[s] - nuc.t_h;
                break;
            }
        }
    } else if (mean_p0.front() >= threshold) {
        // born condensed: the trace starts at or above the target population
        report.t_h = traces.times.front();
        report.dT_threshold = 0.0;
    }

    const auto try_fit = [&](const std::vector<double>& p0_series,
                             const std::vector<double>& pF_series) -> std::optional<RateFit> {
        try {
            const auto [lo, hi] = default_rate_window(traces.times, p0_series);
            return fit_decay_rate(traces.times, pF_series, lo, hi);
        } catch (const std::invalid_argument&) {
            return std::nullopt;
        }
    };

    if (const auto fit = try_fit(mean_p0, mean_pF)) {
        report.k = fit->k;
        report.r_squared = fit->r_squared;
    }

    // Bootstrap over trajectories with a fixed seed: the analysis stays a
    // deterministic function of its input traces.
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, traces.trajectory_count() - 1);
    std::vector<double> k_estimates, t_h_estimates;
    for (int r = 0; r < resamples; ++r) {
        std::vector<std::size_t> picks(traces.trajectory_count());
        for (auto& p : picks) p = pick(rng);
        const auto p0_r = traces.averaged(traces.p0, picks);
        const auto pF_r = traces.averaged(traces.pF, picks);
        if (const auto fit = try_fit(p0_r, pF_r)) k_estimates.push_back(fit->k);
        const Nucleation n_r = detect_nucleation(traces.times, p0_r, q_count);
        if (n_r.found) t_h_estimates.push_back(n_r.t_h);
    }
    report.k_ci = detail::percentile_interval(std::move(k_estimates));
    report.t_h_ci = detail::percentile_interval(std::move(t_h_estimates));
    return report;
}

inline nlohmann::ordered_json report_to_json(const AnalysisReport& r) {
    nlohmann::ordered_json j;
    j["Q"] = r.q;
    j["trajectories"] = r.trajectories;
    if (r.k) j["k"] = *r.k; else j["k"] = nullptr;
    j["k_ci"] = nlohmann::json::array();
    if (std::isfinite(r.k_ci.lo)) j["k_ci"] = {r.k_ci.lo, r.k_ci.hi};
    j["r_squared"] = r.r_squared;
    if (r.t_h) j["t_h"] = *r.t_h; else j["t_h"] = nullptr;
    j["t_h_ci"] = nlohmann::json::array();
    if (std::isfinite(r.t_h_ci.lo)) j["t_h_ci"] = {r.t_h_ci.lo, r.t_h_ci.hi};
    if (r.dT_threshold) j["dT_threshold"] = *r.dT_threshold;
    else j["dT_threshold"] = nullptr;
    j["threshold"] = r.threshold;
    j["baseline"] = r.baseline;
    return j;
}

// ---------------------------------------------------------------------------
// Q-scaling report: the rate law measured across network sizes. Descriptive
// only - no scaling hypothesis is asserted.
// ---------------------------------------------------------------------------

struct ScalingReport {
    double threshold = 0.3;
    std::vector<AnalysisReport> rows;
};

inline ScalingReport scaling_report(const std::vector<BooleanNetwork>& networks, double g,
                                    const IntegratorConfig& cfg, const NoiseSchedule& sched,
                                    InitKind init_kind, int n_traj, std::uint64_t master_seed,
                                    double threshold = 0.3) {
    ScalingReport report;
    report.threshold = threshold;
    std::vector<int> seen_q;
    for (const auto& network : networks) {
        if (brute_force_solutions(network, GateKind::triode).empty())
            throw std::invalid_argument("scaling report requires solvable networks (Q = " +
                                        std::to_string(network.node_count()) + " has none)");
        const int q = network.node_count();
        if (std::find(seen_q.begin(), seen_q.end(), q) != seen_q.end())
            throw std::invalid_argument("duplicate Q = " + std::to_string(q) +
                                        " in scaling report");
        seen_q.push_back(q);

        const SpinSpace space(network, g);
        const auto ps = projector_set(space);
        const auto result =
            ensemble_run(space, ps, cfg, sched, init_kind, n_traj, master_seed);
        auto row = analyze_traces(EnsembleTraces::from_result(result), q, threshold);
        report.rows.push_back(std::move(row));
    }
    return report;
}

inline nlohmann::ordered_json scaling_report_to_json(const ScalingReport& r) {
    nlohmann::ordered_json j;
    j["threshold"] = r.threshold;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows) j["rows"].push_back(report_to_json(row));
    return j;
}

inline std::string scaling_report_to_csv(const ScalingReport& r) {
    std::ostringstream out;
    out << "Q,k,k_lo,k_hi,t_h,t_h_lo,t_h_hi,dT_threshold,r_squared,trajectories\n";
    char buf[64];
    const auto cell = [&](double v) {
        if (!std::isfinite(v)) return std::string();
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& row : r.rows) {
        out << row.q << ',' << cell(row.k.value_or(std::numeric_limits<double>::quiet_NaN()))
            << ',' << cell(row.k_ci.lo) << ',' << cell(row.k_ci.hi) << ','
            << cell(row.t_h.value_or(std::numeric_limits<double>::quiet_NaN())) << ','
            << cell(row.t_h_ci.lo) << ',' << cell(row.t_h_ci.hi) << ','
            << cell(row.dT_threshold.value_or(std::numeric_limits<double>::quiet_NaN())) << ','
            << cell(row.r_squared) << ',' << row.trajectories << '\n';
    }
    return out.str();
}

}  // namespace spinnet
