// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration: a strict JSON tree with explicit unit
// suffixes on every physical key. Unknown keys are rejected with their
// path; missing keys fall back to the standard simulation defaults.

#ifndef MFDA_CONFIG_HPP
#define MFDA_CONFIG_HPP

#include "mfda/orchestrate.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace mfda {

struct grid_spec {
    double delta_r_m = 0.0;
    double delta_theta_deg = 3.0;
    int samples_r = 1;
    int samples_theta = 13;
};

struct sweep_spec {
    std::string axis;  // m | eve_theta_deg | delta_f_hz | dmax_lambda |
                       // brf_hz | delta_theta_deg | start_index
    std::vector<double> values;
};

struct experiment_config {
    scenario sc;
    array_config arr;
    solver_options solver;
    timing_grid timing;
    bool apply_timing = false;  // time-average capacities against the BRF lattice
    refresh_pairing pairing = refresh_pairing::causal;
    grid_spec grid;
    csi_mode csi = csi_mode::perfect;
    std::vector<scheme_kind> schemes{scheme_kind::pa, scheme_kind::fda,
                                     scheme_kind::mfda};
    std::vector<sweep_spec> sweeps;
    std::uint64_t seed = 1;
    std::string output = "run";
    bool emit_traces = false;
};

/// Fully populated defaults: 10 dBm budget, 10 GHz carrier, -100 dBm
/// noise, Bob at (1000 m, 30 deg), Eve at (1000 m, 35 deg), half-lambda
/// minimum spacing, 30-lambda aperture and a 1 GHz frequency budget.
experiment_config default_config();

/// Strict parse: rejects unknown keys naming their path, validates every
/// block against its invariants, converts dB/degree/lambda units once.
experiment_config config_from_json(const nlohmann::json& j);

/// Reads and parses a config file; parse errors carry the byte position.
experiment_config load_config(const std::string& path);

/// Canonical resolved form of a config (SI units, radians as degrees for
/// readability); used for the manifest hash and `validate` echo.
nlohmann::json config_to_json(const experiment_config& cfg);

uncertainty_grid build_grid_from_spec(const scenario& sc, const grid_spec& spec);

} // namespace mfda

#endif
