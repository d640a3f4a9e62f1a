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

// Command line front end. Exit codes: 0 success, 1 runtime failure,
// 2 invalid input (bad file, bad config, bad usage).

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spinnet/network.hpp"
#include "spinnet/run.hpp"

namespace {

spinnet::GateKind gate_kind(const std::string& name) {
    return name == "xor" ? spinnet::GateKind::xor_gate : spinnet::GateKind::triode;
}

spinnet::BooleanNetwork load_network(const std::string& path) {
    std::string text;
    try {
        text = spinnet::read_text_file(path);
    } catch (const spinnet::ConfigError&) {
        throw spinnet::ConfigError("network file not found: " + path);
    }
    return spinnet::parse_network(text);  // ParseError -> exit 2
}

void cmd_validate(const std::string& path, const std::string& gates) {
    const auto network = load_network(path);
    std::printf("Q=%d T=%d W=%d", network.node_count(), network.triode_count(),
                network.wire_count());
    if (gate_kind(gates) == spinnet::GateKind::xor_gate) {
        const auto sol = spinnet::solve_xor_network(network);
        const std::uint64_t count = sol.count();
        std::printf(", %llu solution%s\n", static_cast<unsigned long long>(count),
                    count == 1 ? "" : "s");
    } else if (network.node_count() <= spinnet::kEnumerationBound) {
        const auto sols = spinnet::brute_force_solutions(network, spinnet::GateKind::triode);
        std::printf(", %zu solution%s\n", sols.size(), sols.size() == 1 ? "" : "s");
    } else {
        std::printf(", solution count skipped (Q > %d)\n", spinnet::kEnumerationBound);
    }
}

void cmd_solve_classical(const std::string& path, const std::string& gates,
                         const std::string& method) {
    const auto network = load_network(path);
    if (method == "gf2") {
        if (gate_kind(gates) != spinnet::GateKind::xor_gate)
            throw spinnet::ConfigError("--method gf2 applies to xor gates only");
        const auto sol = spinnet::solve_xor_network(network);
        std::printf("variables: %d\n", sol.num_vars);
        std::printf("particular: %s\n", sol.particular.to_string().c_str());
        for (const auto& v : sol.basis)
            std::printf("basis: %s\n", v.to_string().c_str());
        std::printf("dimension: %d\n", sol.dimension());
        std::printf("count: %llu\n", static_cast<unsigned long long>(sol.count()));
        return;
    }
    const auto sols = spinnet::brute_force_solutions(network, gate_kind(gates));
    for (const auto& a : sols) std::printf("%s\n", a.to_string().c_str());
    if (sols.empty()) std::fprintf(stderr, "no solutions\n");
}

void cmd_simulate(const std::string& config_path, const std::string& out_override) {
    spinnet::RunConfig cfg = spinnet::load_run_config(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    const auto summary = spinnet::run_simulate(cfg);
    std::printf("run complete: %s\n", summary.output_dir.string().c_str());
    std::printf("n_traj=%d extinguished=%d final_p0=%.6g\n", summary.n_traj,
                summary.extinguished, summary.final_p0);
    if (summary.twin_mean_distance)
        std::printf("twin mean terminal distance = %.6g\n", *summary.twin_mean_distance);
}

void cmd_analyze(const std::string& run_dir, double threshold) {
    const auto report = spinnet::run_analyze(run_dir, threshold);
    const auto manifest =
        nlohmann::json::parse(spinnet::read_text_file(spinnet::fs::path(run_dir) /
                                                      "manifest.json"));
    const std::string regime =
        manifest.contains("regime") ? manifest["regime"].get<std::string>() : "actual";
    std::printf("report written: %s\n",
                (spinnet::fs::path(run_dir) / ("report_" + regime + ".json"))
                    .string()
                    .c_str());
    if (report.k)
        std::printf("k=%.6g r_squared=%.6g\n", *report.k, report.r_squared);
    else
        std::printf("k: not identifiable from these traces\n");
    if (report.t_h) std::printf("t_h=%.6g\n", *report.t_h);
    if (report.dT_threshold) std::printf("dT_threshold=%.6g\n", *report.dT_threshold);
}

void cmd_sweep(const std::string& config_path) {
    const auto summary = spinnet::run_sweep(config_path);
    std::printf("sweep complete: %d points -> %s\n", summary.points,
                (summary.output_dir / "aggregate.json").string().c_str());
    if (summary.convergence_order)
        std::printf("convergence order = %.6g\n", *summary.convergence_order);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spinnet: quantum ground-mode computation on spin-pair networks"};
    app.set_version_flag("--version", SPINNET_VERSION_STRING);
    app.require_subcommand(1);

    std::string network_path, gates = "triode", method = "brute";
    std::string config_path, out_override, run_dir;
    double threshold = 0.3;

    auto* validate = app.add_subcommand("validate", "check a network file, report Q/T/W");
    validate->add_option("network", network_path, "network file (.json or .txt)")->required();
    validate->add_option("--gates", gates, "gate family (default triode)")
        ->check(CLI::IsMember({"triode", "xor"}));
    validate->callback([&] { cmd_validate(network_path, gates); });

    auto* solve = app.add_subcommand("solve-classical", "classical reference solver");
    solve->add_option("network", network_path, "network file (.json or .txt)")->required();
    solve->add_option("--gates", gates, "gate family (default triode)")
        ->check(CLI::IsMember({"triode", "xor"}));
    solve->add_option("--method", method,
                      "brute: enumerate all solutions; gf2: affine description (xor only)")
        ->check(CLI::IsMember({"brute", "gf2"}));
    solve->callback([&] { cmd_solve_classical(network_path, gates, method); });

    auto* simulate = app.add_subcommand("simulate", "run an ensemble from a JSON config");
    simulate->add_option("config", config_path, "run config (.json)")->required();
    simulate->add_option("--out", out_override, "override the config's output_dir");
    simulate->callback([&] { cmd_simulate(config_path, out_override); });

    auto* analyze = app.add_subcommand("analyze", "fit rate laws from a run directory");
    analyze->add_option("run_dir", run_dir, "directory written by simulate")->required();
    analyze->add_option("--threshold", threshold, "condensation threshold (default 0.3)");
    analyze->callback([&] { cmd_analyze(run_dir, threshold); });

    auto* sweep = app.add_subcommand("sweep", "cartesian grid of runs plus aggregation");
    sweep->add_option("config", config_path, "sweep config (.json)")->required();
    sweep->callback([&] { cmd_sweep(config_path); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const spinnet::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const spinnet::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
