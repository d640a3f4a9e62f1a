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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinnet/analysis.hpp"
#include "spinnet/evolution.hpp"
#include "spinnet/network.hpp"
#include "spinnet/observables.hpp"

#ifndef SPINNET_VERSION_STRING
#define SPINNET_VERSION_STRING "dev"
#endif

namespace spinnet {

namespace fs = std::filesystem;

// Invalid user input (bad config, bad file, bad schema): maps to exit code 2
// at the CLI, as opposed to runtime failures which map to 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Small file / formatting helpers shared by the commands.
// ---------------------------------------------------------------------------

inline std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out.good()) throw std::runtime_error("failed writing " + path.string());
}

// Full-precision, locale-independent float cell; round-trips exactly.
inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {
inline void require_keys(const nlohmann::ordered_json& obj,
                         std::initializer_list<const char*> allowed, const std::string& ctx) {
    if (!obj.is_object()) throw ConfigError(ctx + " must be a JSON object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* key : allowed)
            if (item.key() == key) { ok = true; break; }
        if (!ok) throw ConfigError("unknown key \"" + item.key() + "\" in " + ctx);
    }
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Run configuration: one JSON document drives one simulation.
// ---------------------------------------------------------------------------

struct RunConfig {
    fs::path base_dir;      // directory all relative paths resolve against
    fs::path network_path;  // resolved
    BooleanNetwork network = BooleanNetwork::make({{1, 2, 3}}, {});
    double g = 1.0;
    Regime regime = Regime::actual;
    InitKind init = InitKind::random_symmetric;
    IntegratorConfig integrator;
    NoiseSchedule schedule;
    int n_traj = 1;
    std::uint64_t master_seed = 0;
    int measurements_per_trajectory = 1;
    bool twin = false;  // projected runs: also integrate the matched actual twin
    fs::path output_dir;  // resolved
    nlohmann::ordered_json echo;  // the document as given, for the manifest
};

// Parses and fully validates a run config. Relative paths resolve against
// base_dir (the config file's directory), so configs work from any cwd.
inline RunConfig parse_run_config(const nlohmann::ordered_json& doc, const fs::path& base_dir) {
    detail::require_keys(doc,
                         {"network", "g", "regime", "init", "integrator", "schedule",
                          "ensemble", "twin", "output_dir"},
                         "run config");
    for (const char* key : {"network", "integrator", "schedule", "ensemble", "output_dir"})
        if (!doc.contains(key)) throw ConfigError(std::string("missing \"") + key + "\" key");

    RunConfig cfg;
    cfg.base_dir = base_dir;
    cfg.echo = doc;

    const auto resolve = [&](const std::string& p) {
        fs::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    cfg.network_path = resolve(doc["network"].get<std::string>());
    std::string network_text;
    try {
        network_text = read_text_file(cfg.network_path);
    } catch (const ConfigError&) {
        throw ConfigError("network file not found: " + cfg.network_path.string());
    }
    try {
        cfg.network = parse_network(network_text);
    } catch (const ParseError& e) {
        throw ConfigError("invalid network " + cfg.network_path.string() + ": " + e.what());
    }

    if (doc.contains("g")) cfg.g = doc["g"].get<double>();
    if (!(cfg.g > 0.0)) throw ConfigError("g must be > 0");
    if (doc.contains("regime")) {
        try {
            cfg.regime = regime_from_name(doc["regime"].get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (doc.contains("init")) {
        try {
            cfg.init = init_kind_from_name(doc["init"].get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }

    const auto& integ = doc["integrator"];
    detail::require_keys(
        integ, {"dt", "t_max", "record_stride", "projection_stride", "sample_grid_dt"},
        "integrator block");
    for (const char* key : {"dt", "t_max"})
        if (!integ.contains(key))
            throw ConfigError(std::string("integrator block misses \"") + key + "\"");
    cfg.integrator.dt = integ["dt"].get<double>();
    cfg.integrator.t_max = integ["t_max"].get<double>();
    if (integ.contains("record_stride"))
        cfg.integrator.record_stride = integ["record_stride"].get<int>();
    if (integ.contains("projection_stride"))
        cfg.integrator.projection_stride = integ["projection_stride"].get<int>();
    if (integ.contains("sample_grid_dt"))
        cfg.integrator.sample_grid_dt = integ["sample_grid_dt"].get<double>();
    cfg.integrator.regime = cfg.regime;

    try {
        cfg.schedule = noise_schedule_from_json(doc["schedule"]);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const auto& ens = doc["ensemble"];
    detail::require_keys(ens, {"n_traj", "master_seed", "measurements_per_trajectory"},
                         "ensemble block");
    if (!ens.contains("n_traj")) throw ConfigError("ensemble block misses \"n_traj\"");
    cfg.n_traj = ens["n_traj"].get<int>();
    if (cfg.n_traj < 1) throw ConfigError("n_traj must be >= 1");
    if (ens.contains("master_seed")) cfg.master_seed = ens["master_seed"].get<std::uint64_t>();
    if (ens.contains("measurements_per_trajectory"))
        cfg.measurements_per_trajectory = ens["measurements_per_trajectory"].get<int>();
    if (cfg.measurements_per_trajectory < 0)
        throw ConfigError("measurements_per_trajectory must be >= 0");

    if (doc.contains("twin")) cfg.twin = doc["twin"].get<bool>();
    if (cfg.twin && cfg.regime != Regime::projected)
        throw ConfigError("twin runs require the projected regime");

    cfg.output_dir = resolve(doc["output_dir"].get<std::string>());

    // Surface integrator/spectral-bound problems at load time.
    try {
        const SpinSpace probe(cfg.network, cfg.g);
        cfg.integrator.validate(probe, cfg.schedule);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline RunConfig load_run_config(const fs::path& config_path) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(read_text_file(config_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("invalid JSON in " + config_path.string() + ": " + e.what());
    }
    return parse_run_config(doc, fs::absolute(config_path).parent_path());
}

// ---------------------------------------------------------------------------
// simulate: run the ensemble, write traces, measurements, and the manifest.
// ---------------------------------------------------------------------------

struct SimulateSummary {
    fs::path output_dir;
    fs::path trace_path;
    int n_traj = 0;
    int extinguished = 0;
    double final_p0 = 0.0;
    std::optional<double> twin_mean_distance;
};

namespace detail {

inline std::string trace_csv(const EnsembleResult& result) {
    std::ostringstream out;
    out << "t,p0,pF,pV,E_N,weight\n";
    for (std::size_t s = 0; s < result.times.size(); ++s)
        out << csv_double(result.times[s]) << ',' << csv_double(result.p0[s]) << ','
            << csv_double(result.pF[s]) << ',' << csv_double(result.pV[s]) << ','
            << csv_double(result.energy[s]) << ',' << csv_double(result.weight[s]) << '\n';
    return out.str();
}

inline std::string trajectories_csv(const EnsembleResult& result) {
    std::ostringstream out;
    out << "traj,t,p0,pF,pV,E_N,weight\n";
    for (std::size_t traj = 0; traj < result.trajectories.size(); ++traj) {
        const auto& tr = result.trajectories[traj];
        for (std::size_t s = 0; s < tr.times.size(); ++s)
            out << traj << ',' << csv_double(tr.times[s]) << ',' << csv_double(tr.probs[s].p0)
                << ',' << csv_double(tr.probs[s].pF) << ',' << csv_double(tr.probs[s].pV)
                << ',' << csv_double(tr.energy[s]) << ',' << csv_double(tr.weights[s]) << '\n';
    }
    return out.str();
}

}  // namespace detail

inline SimulateSummary run_simulate(const RunConfig& cfg) {
    const SpinSpace space(cfg.network, cfg.g);
    const auto ps = projector_set(space);
    const auto result =
        ensemble_run(space, ps, cfg.integrator, cfg.schedule, cfg.init, cfg.n_traj,
                     cfg.master_seed, cfg.measurements_per_trajectory);

    SimulateSummary summary;
    summary.output_dir = cfg.output_dir;
    summary.n_traj = cfg.n_traj;
    for (const auto& traj : result.trajectories)
        if (traj.extinguished) ++summary.extinguished;
    summary.final_p0 = result.p0.back();

    fs::create_directories(cfg.output_dir);
    const std::string regime = regime_name(cfg.regime);
    summary.trace_path = cfg.output_dir / ("trace_" + regime + ".csv");
    write_text_file(summary.trace_path, detail::trace_csv(result));
    write_text_file(cfg.output_dir / "trajectories.csv", detail::trajectories_csv(result));
    write_text_file(cfg.output_dir / "measurements.json",
                    measurement_statistics_json(result.measurement_counts, cfg.network).dump(2) +
                        "\n");

    // Matched actual twin: same seeds, so each trajectory consumes the mean
    // fields of the very realization its projected partner saw.
    std::vector<double> twin_distances;
    if (cfg.twin) {
        IntegratorConfig twin_cfg = cfg.integrator;
        twin_cfg.regime = Regime::actual;
        twin_cfg.matched_fields = true;
        const auto twin = ensemble_run(space, ps, twin_cfg, cfg.schedule, cfg.init, cfg.n_traj,
                                       cfg.master_seed, 0);
        write_text_file(cfg.output_dir / "trace_actual_twin.csv", detail::trace_csv(twin));
        double acc = 0;
        int counted = 0;
        for (int i = 0; i < cfg.n_traj; ++i) {
            if (result.trajectories[i].extinguished) continue;
            const double d = (result.trajectories[i].terminal_state -
                              twin.trajectories[i].terminal_state)
                                 .norm();
            twin_distances.push_back(d);
            acc += d;
            ++counted;
        }
        if (counted > 0) summary.twin_mean_distance = acc / counted;
    }

    nlohmann::ordered_json manifest;
    manifest["version"] = SPINNET_VERSION_STRING;
    manifest["command"] = "simulate";
    manifest["config"] = cfg.echo;
    manifest["network"] = {{"path", cfg.network_path.filename().string()},
                           {"Q", cfg.network.node_count()},
                           {"T", cfg.network.triode_count()},
                           {"W", cfg.network.wire_count()}};
    manifest["regime"] = regime;
    manifest["n_traj"] = cfg.n_traj;
    manifest["master_seed"] = cfg.master_seed;
    nlohmann::ordered_json seeds = nlohmann::ordered_json::array();
    for (int i = 0; i < cfg.n_traj; ++i)
        seeds.push_back(mix_seed({cfg.master_seed, cfg.schedule.seed,
                                  static_cast<std::uint64_t>(i), kStreamNoise}));
    manifest["trajectory_noise_seeds"] = seeds;
    manifest["extinguished"] = summary.extinguished;
    if (summary.twin_mean_distance) {
        manifest["twin"] = {{"mean_terminal_distance", *summary.twin_mean_distance},
                            {"terminal_distances", twin_distances}};
    }
    manifest["outputs"] =
        nlohmann::ordered_json::array({"trace_" + regime + ".csv", "trajectories.csv",
                                       "measurements.json"});
    if (cfg.twin) manifest["outputs"].push_back("trace_actual_twin.csv");
    write_text_file(cfg.output_dir / "manifest.json", manifest.dump(2) + "\n");
    return summary;
}

// ---------------------------------------------------------------------------
// analyze: rebuild per-trajectory traces from a run directory and fit the
// rate laws.
// ---------------------------------------------------------------------------

namespace detail {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw ConfigError("missing column \"" + name + "\"");
    }
};

inline CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV");
    std::istringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.columns.push_back(cell);
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("bad numeric cell \"" + cell + "\" at CSV line " +
                                  std::to_string(line_no));
            }
        }
        if (row.size() != table.columns.size())
            throw ConfigError("CSV line " + std::to_string(line_no) +
                              " has the wrong number of cells");
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace detail

// Reads trajectories.csv + manifest.json from a run directory, reconstructs
// the per-trajectory traces, and writes report_<regime>.json next to them.
inline AnalysisReport run_analyze(const fs::path& run_dir, double threshold = 0.3) {
    const auto table = detail::parse_csv(read_text_file(run_dir / "trajectories.csv"));
    const std::size_t c_traj = table.column("traj");
    const std::size_t c_t = table.column("t");
    const std::size_t c_p0 = table.column("p0");
    const std::size_t c_pF = table.column("pF");
    table.column("pV");   // required by the schema even though the fits
    table.column("E_N");  // only consume p0/pF/weight
    const std::size_t c_w = table.column("weight");

    EnsembleTraces traces;
    std::map<int, std::size_t> traj_index;
    for (const auto& row : table.rows) {
        const int traj = static_cast<int>(row[c_traj]);
        auto [it, inserted] = traj_index.try_emplace(traj, traces.p0.size());
        if (inserted) {
            traces.p0.emplace_back();
            traces.pF.emplace_back();
            traces.weights.emplace_back();
        }
        const std::size_t idx = it->second;
        if (idx == 0) traces.times.push_back(row[c_t]);
        traces.p0[idx].push_back(row[c_p0]);
        traces.pF[idx].push_back(row[c_pF]);
        traces.weights[idx].push_back(row[c_w]);
    }
    if (traces.p0.empty()) throw ConfigError("trajectories.csv holds no rows");
    for (const auto& series : traces.p0)
        if (series.size() != traces.times.size())
            throw ConfigError("trajectories.csv is ragged across trajectories");

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_text_file(run_dir / "manifest.json"));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("invalid manifest.json: ") + e.what());
    }
    if (!manifest.contains("network") || !manifest["network"].contains("Q"))
        throw ConfigError("manifest.json misses network.Q");
    const int q = manifest["network"]["Q"].get<int>();
    const std::string regime =
        manifest.contains("regime") ? manifest["regime"].get<std::string>() : "actual";

    const auto report = analyze_traces(traces, q, threshold);
    write_text_file(run_dir / ("report_" + regime + ".json"),
                    report_to_json(report).dump(2) + "\n");
    return report;
}

// ---------------------------------------------------------------------------
// sweep: cartesian parameter grid, one run directory per point, aggregated
// scaling/convergence outputs at the root.
// ---------------------------------------------------------------------------

namespace detail {

// Sets base[...path...] = value for a dotted path like "integrator.dt".
inline void set_by_dotted_path(nlohmann::ordered_json& doc, const std::string& dotted,
                               const nlohmann::ordered_json& value) {
    nlohmann::ordered_json* cursor = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = dotted.find('.', start);
        const std::string key = dotted.substr(start, dot - start);
        if (key.empty()) throw ConfigError("empty segment in grid key \"" + dotted + "\"");
        if (dot == std::string::npos) {
            (*cursor)[key] = value;
            return;
        }
        cursor = &(*cursor)[key];
        start = dot + 1;
    }
}

}  // namespace detail

struct SweepSummary {
    fs::path output_dir;
    int points = 0;
    std::optional<double> convergence_order;
};

inline SweepSummary run_sweep(const fs::path& sweep_config_path) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(read_text_file(sweep_config_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("invalid JSON in " + sweep_config_path.string() + ": " + e.what());
    }
    detail::require_keys(doc, {"base", "grid", "output_dir", "threshold"}, "sweep config");
    for (const char* key : {"base", "grid", "output_dir"})
        if (!doc.contains(key)) throw ConfigError(std::string("missing \"") + key + "\" key");
    if (!doc["grid"].is_object() || doc["grid"].empty())
        throw ConfigError("sweep grid must be a non-empty object");
    const double threshold = doc.contains("threshold") ? doc["threshold"].get<double>() : 0.3;

    const fs::path base_dir = fs::absolute(sweep_config_path).parent_path();
    const fs::path out_root = [&] {
        fs::path p(doc["output_dir"].get<std::string>());
        return p.is_absolute() ? p : base_dir / p;
    }();

    std::vector<std::string> keys;
    std::vector<std::vector<nlohmann::ordered_json>> values;
    for (const auto& item : doc["grid"].items()) {
        if (!item.value().is_array() || item.value().empty())
            throw ConfigError("grid key \"" + item.key() +
                              "\" must map to a non-empty array");
        keys.push_back(item.key());
        values.emplace_back(item.value().begin(), item.value().end());
    }

    std::vector<std::size_t> radix(keys.size(), 0);
    std::size_t total = 1;
    for (const auto& v : values) total *= v.size();

    SweepSummary summary;
    summary.output_dir = out_root;
    fs::create_directories(out_root);

    nlohmann::ordered_json aggregate = nlohmann::ordered_json::array();
    std::vector<ConvergencePoint> twin_points;
    std::ostringstream csv;
    csv << "point";
    for (const auto& k : keys) csv << ',' << k;
    csv << ",Q,k,t_h,dT_threshold,r_squared,final_p0,twin_distance\n";

    for (std::size_t index = 0; index < total; ++index) {
        // decode mixed-radix index into one grid point, last key fastest
        std::size_t rem = index;
        for (std::size_t k = keys.size(); k-- > 0;) {
            radix[k] = rem % values[k].size();
            rem /= values[k].size();
        }

        nlohmann::ordered_json point_doc = doc["base"];
        nlohmann::ordered_json params;
        for (std::size_t k = 0; k < keys.size(); ++k) {
            detail::set_by_dotted_path(point_doc, keys[k], values[k][radix[k]]);
            params[keys[k]] = values[k][radix[k]];
        }
        char name[32];
        std::snprintf(name, sizeof name, "point_%03zu", index);
        const fs::path point_dir = out_root / name;
        point_doc["output_dir"] = point_dir.string();

        RunConfig cfg = parse_run_config(point_doc, base_dir);
        const SimulateSummary sim = run_simulate(cfg);
        const AnalysisReport report = run_analyze(point_dir, threshold);

        nlohmann::ordered_json row;
        row["point"] = name;
        row["params"] = params;
        row["final_p0"] = sim.final_p0;
        if (sim.twin_mean_distance) row["twin_distance"] = *sim.twin_mean_distance;
        row["report"] = report_to_json(report);
        aggregate.push_back(row);

        csv << name;
        for (std::size_t k = 0; k < keys.size(); ++k) {
            const auto& v = values[k][radix[k]];
            csv << ',' << (v.is_string() ? v.get<std::string>() : v.dump());
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const auto cell = [&](double x) { return std::isfinite(x) ? csv_double(x) : ""; };
        csv << ',' << report.q << ',' << cell(report.k.value_or(nan)) << ','
            << cell(report.t_h.value_or(nan)) << ','
            << cell(report.dT_threshold.value_or(nan)) << ',' << cell(report.r_squared) << ','
            << cell(sim.final_p0) << ',' << cell(sim.twin_mean_distance.value_or(nan)) << '\n';

        if (sim.twin_mean_distance && *sim.twin_mean_distance > 0)
            twin_points.push_back({cfg.integrator.dt, *sim.twin_mean_distance});
        ++summary.points;
    }

    nlohmann::ordered_json root;
    root["version"] = SPINNET_VERSION_STRING;
    root["command"] = "sweep";
    root["threshold"] = threshold;
    root["points"] = aggregate;

    // A dt-grid of twin runs doubles as a convergence study for the
    // projected-vs-actual construction.
    std::vector<double> dts;
    for (const auto& p : twin_points) dts.push_back(p.dt);
    std::sort(dts.begin(), dts.end());
    if (twin_points.size() >= 2 && std::unique(dts.begin(), dts.end()) == dts.end()) {
        nlohmann::ordered_json conv;
        conv["order"] = fitted_order(twin_points);
        conv["points"] = nlohmann::ordered_json::array();
        for (const auto& p : twin_points)
            conv["points"].push_back({{"dt", p.dt}, {"distance", p.distance}});
        root["convergence"] = conv;
        summary.convergence_order = fitted_order(twin_points);
    }

    write_text_file(out_root / "aggregate.json", root.dump(2) + "\n");
    write_text_file(out_root / "aggregate.csv", csv.str());
    return summary;
}

}  // namespace spinnet
