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

#include <cmath>
#include <random>

#include "spinnet/analysis.hpp"

using namespace spinnet;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / (n - 1);
    return xs;
}

}  // namespace

TEST_CASE("exact exponentials fit exactly", "[analysis]") {
    const auto t = linspace(0.0, 2.0, 50);
    std::vector<double> pF(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) pF[i] = std::exp(-2.0 * t[i]);
    const auto fit = fit_decay_rate(t, pF, 0.0, 2.0);
    REQUIRE(fit.k == Catch::Approx(2.0).margin(1e-12));
    REQUIRE(fit.r_squared == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(fit.points == 50);
}

TEST_CASE("discrete-recurrence traces recover the rate within one percent", "[analysis]") {
    // pF(t_{i+1}) = (1 - k dt) pF(t_i) with k dt = 0.01
    const double k = 1.0, dt = 0.01;
    std::vector<double> t, pF;
    double p = 1.0;
    for (int i = 0; i <= 400; ++i) {
        t.push_back(i * dt);
        pF.push_back(p);
        p *= 1.0 - k * dt;
    }
    const auto fit = fit_decay_rate(t, pF, 0.0, 4.0);
    REQUIRE(std::abs(fit.k - k) / k < 0.01);
}

TEST_CASE("constant traces have zero rate", "[analysis]") {
    const auto t = linspace(0.0, 1.0, 20);
    const std::vector<double> pF(t.size(), 0.8);
    const auto fit = fit_decay_rate(t, pF, 0.0, 1.0);
    REQUIRE(fit.k == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("rate fit input validation", "[analysis]") {
    const auto t = linspace(0.0, 1.0, 10);
    std::vector<double> pF(t.size(), 0.5);
    pF[4] = 0.0;
    REQUIRE_THROWS_AS(fit_decay_rate(t, pF, 0.0, 1.0), std::invalid_argument);
    pF[4] = 0.5;
    REQUIRE_THROWS_AS(fit_decay_rate(t, pF, 5.0, 6.0), std::invalid_argument);
    REQUIRE_THROWS_AS(fit_decay_rate(t, {0.5, 0.5}, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("default window is gated by the solution population", "[analysis]") {
    const auto t = linspace(0.0, 1.0, 11);  // steps of 0.1
    std::vector<double> p0(t.size(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) p0[i] = 0.05 * i;  // crosses 0.3 at i = 6
    const auto [lo, hi] = default_rate_window(t, p0);
    REQUIRE(lo == 0.0);
    REQUIRE(hi == Catch::Approx(0.5));

    std::vector<double> high(t.size(), 0.9);
    REQUIRE_THROWS_AS(default_rate_window(t, high), std::invalid_argument);
}

TEST_CASE("nucleation detection needs persistence", "[analysis]") {
    const auto t = linspace(0.0, 1.0, 11);
    SECTION("flat zero never nucleates") {
        const std::vector<double> p0(t.size(), 0.0);
        REQUIRE_FALSE(detect_nucleation(t, p0, 6).found);
    }
    SECTION("single blips are ignored") {
        std::vector<double> p0(t.size(), 0.0);
        p0[3] = 0.5;  // one snapshot above, then back down
        p0[7] = 0.5;
        REQUIRE_FALSE(detect_nucleation(t, p0, 6, 0.1).found);
    }
    SECTION("three consecutive snapshots nucleate at the first") {
        std::vector<double> p0(t.size(), 0.0);
        p0[4] = p0[5] = p0[6] = 0.5;
        const auto n = detect_nucleation(t, p0, 6, 0.1);
        REQUIRE(n.found);
        REQUIRE(n.t_h == Catch::Approx(t[4]));
        REQUIRE(n.index == 4);
        REQUIRE(n.baseline == 0.1);
    }
    SECTION("traces above an explicit baseline nucleate immediately") {
        const std::vector<double> p0(t.size(), 0.4);
        const auto n = detect_nucleation(t, p0, 6, 0.1);
        REQUIRE(n.found);
        REQUIRE(n.t_h == 0.0);
    }
    SECTION("default baseline is max of 2^-Q and the initial value") {
        std::vector<double> p0(t.size(), 0.001);  // below 2^-6 = 0.015625
        const auto n = detect_nucleation(t, p0, 6);
        REQUIRE(n.baseline == Catch::Approx(1.0 / 64.0));
        std::vector<double> p1(t.size(), 0.2);
        const auto m = detect_nucleation(t, p1, 6);
        REQUIRE(m.baseline == Catch::Approx(0.2));
    }
}

TEST_CASE("growth prediction evaluates the exponential law", "[analysis]") {
    // 1/64 * e^{ln 19.2} = 0.3
    const auto g = predict_growth(1.0 / 64.0, 1.0, std::log(19.2));
    REQUIRE(g.p0 == Catch::Approx(0.3).margin(1e-12));

    REQUIRE(predict_growth(0.01, 2.0, 0.0).p0 == Catch::Approx(0.01));
    REQUIRE_FALSE(predict_growth(0.01, 1.0, 1.0).beyond_validity);
    REQUIRE(predict_growth(0.2, 1.0, 3.0).beyond_validity);

    // doubling the window squares the growth factor
    const double base = predict_growth(0.001, 1.3, 0.7).p0 / 0.001;
    const double doubled = predict_growth(0.001, 1.3, 1.4).p0 / 0.001;
    REQUIRE(doubled == Catch::Approx(base * base).epsilon(1e-12));

    REQUIRE_THROWS_AS(predict_growth(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("variable rates compose exactly", "[analysis]") {
    SECTION("equal rates") {
        const auto r = variable_rate_check({2.0, 2.0, 2.0}, {0.5, 0.25, 0.25});
        REQUIRE(r.consistent);
        REQUIRE(r.mean_rate == Catch::Approx(2.0));
        REQUIRE(r.relative_residual < 1e-12);
    }
    SECTION("worked two-slice example") {
        const auto r = variable_rate_check({1.0, 3.0}, {1.0, 1.0});
        REQUIRE(r.mean_rate == Catch::Approx(2.0));
        REQUIRE(r.product_factor == Catch::Approx(std::exp(4.0)));
        REQUIRE(r.mean_factor == Catch::Approx(std::exp(4.0)));
        REQUIRE(r.consistent);
    }
    SECTION("random slicings stay within 1e-12") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.1, 2.0);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> rates, lengths;
            for (int i = 0; i < 7; ++i) {
                rates.push_back(u(rng));
                lengths.push_back(u(rng));
            }
            REQUIRE(variable_rate_check(rates, lengths).consistent);
        }
    }
    SECTION("input validation") {
        REQUIRE_THROWS_AS(variable_rate_check({1.0}, {1.0, 2.0}), std::invalid_argument);
        REQUIRE_THROWS_AS(variable_rate_check({1.0}, {0.0}), std::invalid_argument);
    }
}

TEST_CASE("trace analysis recovers synthetic ensemble rates", "[analysis]") {
    // 20 trajectories with jittered decay rates around k = 2 and a growing
    // solution population crossing the 0.3 threshold inside the horizon.
    EnsembleTraces traces;
    traces.times = linspace(0.0, 2.0, 81);
    std::mt19937_64 rng(23);
    std::normal_distribution<double> jitter(0.0, 0.05);
    const double k_true = 2.0;
    for (int traj = 0; traj < 20; ++traj) {
        const double k_i = k_true + jitter(rng);
        std::vector<double> p0, pF, w;
        for (double t : traces.times) {
            const double growth = 0.01 * std::exp(k_i * t);
            p0.push_back(std::min(growth, 1.0));
            pF.push_back(std::exp(-k_i * t));
            w.push_back(1.0);
        }
        traces.p0.push_back(p0);
        traces.pF.push_back(pF);
        traces.weights.push_back(w);
    }

    const auto report = analyze_traces(traces, 6);
    REQUIRE(report.k.has_value());
    REQUIRE(*report.k == Catch::Approx(k_true).margin(0.05));
    REQUIRE(report.r_squared > 0.999);
    REQUIRE(report.k_ci.lo < k_true);
    REQUIRE(report.k_ci.hi > k_true);
    REQUIRE(report.k_ci.lo < report.k_ci.hi);
    REQUIRE(report.t_h.has_value());
    REQUIRE(report.dT_threshold.has_value());
    REQUIRE(*report.dT_threshold > 0.0);

    // deterministic: bootstrap runs from a fixed seed
    const auto again = analyze_traces(traces, 6);
    REQUIRE(again.k_ci.lo == report.k_ci.lo);
    REQUIRE(again.t_h_ci.hi == report.t_h_ci.hi);
}

TEST_CASE("growth prediction matches the trace on its validity window", "[analysis]") {
    const auto t = linspace(0.0, 2.0, 81);
    const double k = 1.5, p0_start = 0.002;
    std::vector<double> p0, pF;
    for (double x : t) {
        p0.push_back(p0_start * std::exp(k * x));
        pF.push_back(0.9 * std::exp(-k * x));
    }
    const auto [lo, hi] = default_rate_window(t, p0);
    const auto fit = fit_decay_rate(t, pF, lo, hi);
    REQUIRE(fit.r_squared > 0.9);
    const auto nuc = detect_nucleation(t, p0, 6, 0.004);
    REQUIRE(nuc.found);

    // predict forward to a later in-window snapshot and compare
    const std::size_t target = nuc.index + 20;
    const double dT = t[target] - nuc.t_h;
    const auto g = predict_growth(p0[nuc.index], fit.k, dT);
    const double ratio = g.p0 / p0[target];
    REQUIRE(ratio > 0.5);
    REQUIRE(ratio < 2.0);
}

TEST_CASE("ensemble traces mirror the evolution averages", "[analysis]") {
    const SpinSpace space(
        BooleanNetwork::make({{1, 2, 3}, {4, 5, 6}}, {{1, 2}, {3, 5}, {1, 4}, {2, 6}}), 1.0);
    const auto ps = projector_set(space);
    IntegratorConfig cfg;
    cfg.dt = 5e-3;
    cfg.t_max = 0.2;
    cfg.record_stride = 8;
    cfg.regime = Regime::projected;
    NoiseSchedule sched;
    sched.sigma0 = 0.4;
    sched.seed = 3;
    const auto result = ensemble_run(space, ps, cfg, sched, InitKind::random_symmetric, 6, 11);
    const auto traces = EnsembleTraces::from_result(result);
    REQUIRE(traces.trajectory_count() == 6);
    const auto mean_p0 = traces.averaged(traces.p0, traces.all_indices());
    for (std::size_t s = 0; s < result.times.size(); ++s)
        REQUIRE(mean_p0[s] == Catch::Approx(result.p0[s]).margin(1e-13));
}

TEST_CASE("scaling report covers solvable networks and flags misuse", "[analysis]") {
    const auto single = BooleanNetwork::make({{1, 2, 3}}, {});
    const auto canonical =
        BooleanNetwork::make({{1, 2, 3}, {4, 5, 6}}, {{1, 2}, {3, 5}, {1, 4}, {2, 6}});
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 0.2;
    cfg.record_stride = 4;
    NoiseSchedule sched;
    sched.sigma0 = 0.1;
    sched.seed = 5;

    const auto report = scaling_report({single, canonical}, 1.0, cfg, sched,
                                       InitKind::uniform_triplet, 3, 21, 0.3);
    REQUIRE(report.rows.size() == 2);
    REQUIRE(report.rows[0].q == 3);
    REQUIRE(report.rows[1].q == 6);
    // a wireless triode network is born condensed: p0 = 1 from the start
    REQUIRE(report.rows[0].dT_threshold.has_value());
    REQUIRE(*report.rows[0].dT_threshold == 0.0);

    const auto json = scaling_report_to_json(report);
    REQUIRE(json["rows"].size() == 2);
    REQUIRE(json["rows"][0].contains("k_ci"));
    const auto csv = scaling_report_to_csv(report);
    REQUIRE(csv.rfind("Q,k,", 0) == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 3);

    // unsolvable network: triode forces exactly one low node per triple, the
    // wires glue all three to equal values
    const auto unsat = BooleanNetwork::make({{1, 2, 3}}, {{1, 2}, {2, 3}});
    REQUIRE_THROWS_AS(scaling_report({unsat}, 1.0, cfg, sched, InitKind::uniform_triplet, 2, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        scaling_report({single, single}, 1.0, cfg, sched, InitKind::uniform_triplet, 2, 1),
        std::invalid_argument);
}

TEST_CASE("report json carries the documented fields", "[analysis]") {
    AnalysisReport r;
    r.q = 6;
    r.trajectories = 10;
    r.k = 1.5;
    r.k_ci = {1.4, 1.6};
    r.r_squared = 0.98;
    r.t_h = 0.2;
    r.t_h_ci = {0.1, 0.3};
    r.dT_threshold = 1.1;
    const auto j = report_to_json(r);
    for (const char* key :
         {"Q", "k", "k_ci", "r_squared", "t_h", "t_h_ci", "dT_threshold", "trajectories"})
        REQUIRE(j.contains(key));
    REQUIRE(j["Q"] == 6);
    REQUIRE(j["k_ci"][0] == 1.4);

    AnalysisReport empty;
    empty.q = 3;
    const auto je = report_to_json(empty);
    REQUIRE(je["k"].is_null());
    REQUIRE(je["t_h"].is_null());
}
