// SPDX-License-Identifier: Apache-2.0

#include "mfda/experiment.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <sstream>

namespace mfda {

namespace {

namespace fs = std::filesystem;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string sanitize_status(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r')
            c = ';';
    return s;
}

struct point_task {
    double sweep_value = 0.0;
    std::size_t point_index = 0;
    std::size_t scheme_index = 0;
    experiment_config cfg;  // axis already applied
    scheme_spec scheme;
    bool start_trace = false;  // start_index axis: trace one block solve
};

struct point_outcome {
    scheme_report report;
    std::vector<std::string> trace_lines;
};

void apply_axis(experiment_config& cfg, const std::string& axis, double value) {
    if (axis == "m") {
        const int m = static_cast<int>(std::llround(value));
        if (m < 1)
            throw validation_error("sweep: m must be at least 1");
        cfg.arr = make_reference_array(m, cfg.arr.fc_hz, cfg.arr.delta_f_hz,
                                       cfg.arr.d0_m, cfg.arr.dmax_m, cfg.sc);
    } else if (axis == "eve_theta_deg") {
        cfg.sc.eve.theta_rad = value * std::numbers::pi / 180.0;
    } else if (axis == "delta_f_hz") {
        cfg.arr.delta_f_hz = value;
        cfg.arr = make_reference_array(cfg.arr.m, cfg.arr.fc_hz, value, cfg.arr.d0_m,
                                       cfg.arr.dmax_m, cfg.sc);
    } else if (axis == "dmax_lambda") {
        cfg.arr.dmax_m = value * cfg.sc.wavelength_m(cfg.arr.fc_hz);
        cfg.arr = make_reference_array(cfg.arr.m, cfg.arr.fc_hz, cfg.arr.delta_f_hz,
                                       cfg.arr.d0_m, cfg.arr.dmax_m, cfg.sc);
    } else if (axis == "brf_hz") {
        cfg.timing.dt_brf_s = 1.0 / value;
        cfg.apply_timing = true;
    } else if (axis == "delta_theta_deg") {
        cfg.grid.delta_theta_deg = value;
    } else if (axis == "start_index") {
        // handled by the runner: seeds a random initial geometry
    } else {
        throw validation_error("sweep: unknown axis '" + axis + "'");
    }
}

// Convergence run from a random feasible start: the first geometry block
// only, traced sweep by sweep.
scheme_report run_start_trace(const experiment_config& cfg, const scheme_spec& scheme,
                              std::uint64_t seed) {
    scheme_report rep;
    rep.scheme = scheme;
    rep.seed = seed;
    rep.upper_bound = upper_bound_bits(cfg.arr.m, cfg.sc);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        solver_options opts = cfg.solver;
        if (opts.dx_m <= 0.0)
            opts.dx_m = cfg.sc.wavelength_m(cfg.arr.fc_hz) / 20.0;
        if (opts.df_hz <= 0.0)
            opts.df_hz = (cfg.arr.delta_f_hz > 0.0) ? cfg.arr.delta_f_hz / 200.0 : 1.0;

        array_config tmpl = make_reference_array(cfg.arr.m, cfg.arr.fc_hz,
                                                 cfg.arr.delta_f_hz, cfg.arr.d0_m,
                                                 cfg.arr.dmax_m, cfg.sc);
        const array_config init = random_feasible_array(tmpl, cfg.sc, seed);

        sweep_result sweep;
        if (scheme.csi == csi_mode::perfect) {
            sweep = bsum_sweep_positions(init, cfg.sc, opts);
        } else {
            const uncertainty_grid grid = build_grid_from_spec(cfg.sc, cfg.grid);
            sweep = bcd_line_search_positions(init, cfg.sc, grid, opts);
        }
        rep.sol.array = sweep.array;
        rep.sol.block_traces.push_back({"positions", 1, sweep.trace});
        rep.sol.iterations_stage1 = sweep.sweeps;
        rep.iterations_stage1 = sweep.sweeps;
        rep.capacity_bits = sweep.trace.back().capacity_bits;
        rep.ideal_capacity_bits = rep.capacity_bits;
    } catch (const std::exception& e) {
        rep.status = e.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    rep.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return rep;
}

point_outcome run_point(const point_task& task, std::uint64_t root_seed) {
    const std::uint64_t seed = derive_seed(root_seed, task.point_index, task.scheme_index);
    point_outcome out;
    if (task.start_trace) {
        out.report = run_start_trace(task.cfg, task.scheme, seed);
    } else {
        std::optional<timing_grid> timing;
        if (task.cfg.apply_timing && task.scheme.csi == csi_mode::perfect)
            timing = task.cfg.timing;
        std::optional<uncertainty_grid> grid;
        if (task.scheme.csi == csi_mode::imperfect)
            grid = build_grid_from_spec(task.cfg.sc, task.cfg.grid);
        out.report = run_scheme(task.scheme, task.cfg.sc, task.cfg.arr, task.cfg.solver,
                                timing, grid, seed, task.cfg.pairing);
    }

    if (task.cfg.emit_traces) {
        const std::string prefix = fmt_double(task.sweep_value) + "," +
                                   to_string(task.scheme.kind) + ",";
        for (const block_trace& bt : out.report.sol.block_traces) {
            for (const sweep_trace_row& row : bt.rows) {
                out.trace_lines.push_back(prefix + bt.block + "," +
                                          std::to_string(bt.outer) + "," +
                                          std::to_string(row.iteration) + "," +
                                          fmt_double(row.objective) + "," +
                                          fmt_double(row.capacity_bits));
            }
        }
        for (const robust_trace_row& row : out.report.sol.stage2_trace) {
            out.trace_lines.push_back(prefix + "abv_ao,1," + std::to_string(row.iteration) +
                                      "," + fmt_double(row.trace_w) + "," +
                                      fmt_double(row.capacity_bits));
        }
    }
    return out;
}

std::string csv_row(const point_task& task, const scheme_report& rep,
                    bool record_wall_time) {
    std::ostringstream os;
    os << fmt_double(task.sweep_value) << ',' << to_string(task.scheme.kind) << ','
       << fmt_double(rep.capacity_bits) << ',' << fmt_double(rep.ideal_capacity_bits)
       << ',' << fmt_double(rep.upper_bound) << ',' << rep.iterations_stage1 << ','
       << rep.iterations_stage2 << ',' << rep.seed << ','
       << (record_wall_time ? fmt_double(rep.wall_ms) : "0") << ','
       << sanitize_status(rep.status);
    return os.str();
}

} // namespace

std::uint64_t config_hash(const experiment_config& cfg) {
    const std::string dump = config_to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

experiment_result run_experiment(const experiment_config& cfg, const run_options& opts) {
    experiment_config base = cfg;
    if (opts.csi_override)
        base.csi = *opts.csi_override;
    if (opts.seed_override)
        base.seed = *opts.seed_override;

    std::vector<sweep_spec> sweeps = base.sweeps;
    if (sweeps.empty())
        sweeps.push_back({"none", {0.0}});

    fs::create_directories(opts.output_dir);
    experiment_result result;
    nlohmann::json manifest;
    manifest["config_hash"] = config_hash(base);
    manifest["versions"] = {{"mfda", MFDA_VERSION},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                          std::to_string(EIGEN_MINOR_VERSION)}};
    manifest["seed"] = base.seed;
    manifest["threads"] = opts.threads;
    manifest["csi"] = to_string(base.csi);
    nlohmann::json seeds = nlohmann::json::array();

    std::vector<std::string> trace_lines;
    bool any_trace = false;

    for (std::size_t si = 0; si < sweeps.size(); ++si) {
        const sweep_spec& sweep = sweeps[si];

        std::vector<point_task> tasks;
        for (std::size_t vi = 0; vi < sweep.values.size(); ++vi) {
            for (std::size_t ki = 0; ki < base.schemes.size(); ++ki) {
                point_task task;
                task.sweep_value = sweep.values[vi];
                task.point_index = si * 1000 + vi;
                task.scheme_index = ki;
                task.cfg = base;
                if (sweep.axis != "none")
                    apply_axis(task.cfg, sweep.axis, sweep.values[vi]);
                task.scheme = {base.schemes[ki], base.csi};
                task.start_trace = (sweep.axis == "start_index");
                tasks.push_back(std::move(task));
            }
        }

        std::vector<point_outcome> outcomes(tasks.size());
        if (opts.threads > 1) {
            std::vector<std::future<point_outcome>> futures;
            futures.reserve(tasks.size());
            for (const point_task& task : tasks)
                futures.push_back(std::async(std::launch::async, run_point, std::cref(task),
                                             base.seed));
            for (std::size_t i = 0; i < futures.size(); ++i)
                outcomes[i] = futures[i].get();
        } else {
            for (std::size_t i = 0; i < tasks.size(); ++i)
                outcomes[i] = run_point(tasks[i], base.seed);
        }

        std::string name = base.output;
        if (base.sweeps.size() > 1)
            name += "_" + sweep.axis;
        const fs::path csv_path = fs::path(opts.output_dir) / (name + ".csv");
        std::ofstream csv(csv_path, std::ios::binary);
        csv << "sweep_value,scheme,capacity_bits,ideal_capacity_bits,upper_bound_bits,"
               "iterations_stage1,iterations_stage2,seed,wall_ms,status\n";
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            csv << csv_row(tasks[i], outcomes[i].report, opts.record_wall_time) << '\n';
            seeds.push_back(outcomes[i].report.seed);
            ++result.rows;
            if (outcomes[i].report.status != "ok")
                ++result.failed_rows;
            for (std::string& line : outcomes[i].trace_lines) {
                trace_lines.push_back(std::move(line));
                any_trace = true;
            }
        }
        result.files.push_back(csv_path.string());
    }

    if (any_trace) {
        const fs::path trace_path =
            fs::path(opts.output_dir) / (base.output + "_traces.csv");
        std::ofstream tr(trace_path, std::ios::binary);
        tr << "sweep_value,scheme,block,outer,iteration,objective,capacity_bits\n";
        for (const std::string& line : trace_lines)
            tr << line << '\n';
        result.files.push_back(trace_path.string());
    }

    manifest["row_seeds"] = seeds;
    manifest["outputs"] = result.files;
    const fs::path manifest_path =
        fs::path(opts.output_dir) / (base.output + "_manifest.json");
    std::ofstream mf(manifest_path, std::ios::binary);
    mf << manifest.dump(2) << '\n';
    result.files.push_back(manifest_path.string());
    return result;
}

} // namespace mfda
