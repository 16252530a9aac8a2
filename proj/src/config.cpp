// SPDX-License-Identifier: Apache-2.0

#include "mfda/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace mfda {

namespace {

using nlohmann::json;

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }
double dbm2mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw2dbm(double mw) { return 10.0 * std::log10(mw); }

void reject_unknown(const json& j, const std::string& scope,
                    const std::set<std::string>& allowed) {
    if (!j.is_object())
        throw validation_error("config: " + scope + " must be an object");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key()))
            throw validation_error("config: unknown key '" +
                                   (scope.empty() ? item.key() : scope + "." + item.key()) +
                                   "'");
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key))
        out = j.at(key).get<T>();
}

void parse_scenario(const json& j, scenario& sc) {
    reject_unknown(j, "scenario",
                   {"pmax_dbm", "noise_bob_dbm", "noise_eve_dbm", "bob_r_m",
                    "bob_theta_deg", "eve_r_m", "eve_theta_deg", "pathloss_c_db",
                    "pathloss_ref_m", "alpha_bob", "alpha_eve", "c_mps"});
    if (j.contains("pmax_dbm"))
        sc.pmax_mw = dbm2mw(j.at("pmax_dbm").get<double>());
    if (j.contains("noise_bob_dbm"))
        sc.noise_bob_mw = dbm2mw(j.at("noise_bob_dbm").get<double>());
    if (j.contains("noise_eve_dbm"))
        sc.noise_eve_mw = dbm2mw(j.at("noise_eve_dbm").get<double>());
    read(j, "bob_r_m", sc.bob.r_m);
    read(j, "eve_r_m", sc.eve.r_m);
    if (j.contains("bob_theta_deg"))
        sc.bob.theta_rad = deg2rad(j.at("bob_theta_deg").get<double>());
    if (j.contains("eve_theta_deg"))
        sc.eve.theta_rad = deg2rad(j.at("eve_theta_deg").get<double>());
    read(j, "pathloss_c_db", sc.pathloss_c_db);
    read(j, "pathloss_ref_m", sc.pathloss_ref_m);
    read(j, "alpha_bob", sc.alpha_bob);
    read(j, "alpha_eve", sc.alpha_eve);
    read(j, "c_mps", sc.c_mps);
}

void parse_array(const json& j, array_config& arr, const scenario& sc) {
    reject_unknown(j, "array",
                   {"m", "fc_hz", "delta_f_hz", "d0_lambda", "d0_m", "dmax_lambda",
                    "dmax_m", "x_m", "f_hz"});
    read(j, "m", arr.m);
    read(j, "fc_hz", arr.fc_hz);
    read(j, "delta_f_hz", arr.delta_f_hz);
    const double lambda = sc.wavelength_m(arr.fc_hz);
    if (j.contains("d0_lambda") && j.contains("d0_m"))
        throw validation_error("config: give d0 in exactly one unit");
    if (j.contains("dmax_lambda") && j.contains("dmax_m"))
        throw validation_error("config: give dmax in exactly one unit");
    if (j.contains("d0_lambda"))
        arr.d0_m = j.at("d0_lambda").get<double>() * lambda;
    read(j, "d0_m", arr.d0_m);
    if (j.contains("dmax_lambda"))
        arr.dmax_m = j.at("dmax_lambda").get<double>() * lambda;
    read(j, "dmax_m", arr.dmax_m);
    // Explicit geometry overrides the reference layout.
    if (j.contains("x_m"))
        arr.x = j.at("x_m").get<std::vector<double>>();
    if (j.contains("f_hz"))
        arr.f = j.at("f_hz").get<std::vector<double>>();
}

void parse_solver(const json& j, solver_options& s) {
    reject_unknown(j, "solver",
                   {"epsilon_bits", "max_sweeps", "max_outer", "dx_m", "df_hz",
                    "randomization_count", "rank1_ratio", "fw_gap_tol",
                    "fw_max_iters", "max_outer_w", "random_starts"});
    read(j, "epsilon_bits", s.epsilon_bits);
    read(j, "max_sweeps", s.max_sweeps);
    read(j, "max_outer", s.max_outer);
    read(j, "dx_m", s.dx_m);
    read(j, "df_hz", s.df_hz);
    read(j, "randomization_count", s.randomization_count);
    read(j, "rank1_ratio", s.rank1_ratio);
    read(j, "fw_gap_tol", s.fw_gap_tol);
    read(j, "fw_max_iters", s.fw_max_iters);
    read(j, "max_outer_w", s.max_outer_w);
    read(j, "random_starts", s.random_starts);
}

void parse_timing(const json& j, experiment_config& cfg) {
    reject_unknown(j, "timing",
                   {"t_total_s", "dt_crf_s", "dt_brf_s", "apply", "pairing"});
    read(j, "t_total_s", cfg.timing.t_total_s);
    read(j, "dt_crf_s", cfg.timing.dt_crf_s);
    read(j, "dt_brf_s", cfg.timing.dt_brf_s);
    read(j, "apply", cfg.apply_timing);
    if (j.contains("pairing")) {
        const std::string p = j.at("pairing").get<std::string>();
        if (p == "causal")
            cfg.pairing = refresh_pairing::causal;
        else if (p == "double_sum")
            cfg.pairing = refresh_pairing::double_sum;
        else
            throw validation_error("config: timing.pairing must be 'causal' or 'double_sum'");
    }
}

void parse_grid(const json& j, grid_spec& g) {
    reject_unknown(j, "grid",
                   {"delta_r_m", "delta_theta_deg", "samples_r", "samples_theta"});
    read(j, "delta_r_m", g.delta_r_m);
    read(j, "delta_theta_deg", g.delta_theta_deg);
    read(j, "samples_r", g.samples_r);
    read(j, "samples_theta", g.samples_theta);
}

scheme_kind parse_scheme_kind(const std::string& name) {
    if (name == "PA")
        return scheme_kind::pa;
    if (name == "FDA")
        return scheme_kind::fda;
    if (name == "MFDA")
        return scheme_kind::mfda;
    throw validation_error("config: unknown scheme '" + name + "'");
}

const std::set<std::string> known_axes = {
    "m", "eve_theta_deg", "delta_f_hz", "dmax_lambda",
    "brf_hz", "delta_theta_deg", "start_index"};

} // namespace

experiment_config default_config() {
    experiment_config cfg;
    cfg.sc.bob = {1000.0, deg2rad(30.0)};
    cfg.sc.eve = {1000.0, deg2rad(35.0)};
    cfg.arr.m = 10;
    cfg.arr.fc_hz = 10e9;
    cfg.arr.delta_f_hz = 1e9;
    const double lambda = cfg.sc.wavelength_m(cfg.arr.fc_hz);
    cfg.arr.d0_m = 0.5 * lambda;
    cfg.arr.dmax_m = 30.0 * lambda;
    cfg.arr = make_reference_array(cfg.arr.m, cfg.arr.fc_hz, cfg.arr.delta_f_hz,
                                   cfg.arr.d0_m, cfg.arr.dmax_m, cfg.sc);
    return cfg;
}

experiment_config config_from_json(const json& j) {
    experiment_config cfg = default_config();
    reject_unknown(j, "",
                   {"scenario", "array", "solver", "timing", "grid", "csi",
                    "schemes", "sweeps", "seed", "output", "emit_traces"});
    if (j.contains("scenario"))
        parse_scenario(j.at("scenario"), cfg.sc);

    // Rebuild the geometry template against the (possibly updated)
    // scenario before array keys are applied on top.
    array_config tmpl = cfg.arr;
    if (j.contains("array")) {
        const json& ja = j.at("array");
        parse_array(ja, tmpl, cfg.sc);
        if (!ja.contains("x_m") || !ja.contains("f_hz")) {
            array_config ref = make_reference_array(tmpl.m, tmpl.fc_hz, tmpl.delta_f_hz,
                                                    tmpl.d0_m, tmpl.dmax_m, cfg.sc);
            if (!ja.contains("x_m"))
                tmpl.x = ref.x;
            if (!ja.contains("f_hz"))
                tmpl.f = ref.f;
        }
    } else {
        tmpl = make_reference_array(tmpl.m, tmpl.fc_hz, tmpl.delta_f_hz, tmpl.d0_m,
                                    tmpl.dmax_m, cfg.sc);
    }
    cfg.arr = tmpl;

    if (j.contains("solver"))
        parse_solver(j.at("solver"), cfg.solver);
    if (j.contains("timing"))
        parse_timing(j.at("timing"), cfg);
    if (j.contains("grid"))
        parse_grid(j.at("grid"), cfg.grid);
    if (j.contains("csi")) {
        const std::string c = j.at("csi").get<std::string>();
        if (c == "perfect")
            cfg.csi = csi_mode::perfect;
        else if (c == "imperfect")
            cfg.csi = csi_mode::imperfect;
        else
            throw validation_error("config: csi must be 'perfect' or 'imperfect'");
    }
    if (j.contains("schemes")) {
        cfg.schemes.clear();
        for (const auto& s : j.at("schemes"))
            cfg.schemes.push_back(parse_scheme_kind(s.get<std::string>()));
        if (cfg.schemes.empty())
            throw validation_error("config: schemes must not be empty");
    }
    if (j.contains("sweeps")) {
        cfg.sweeps.clear();
        for (const auto& s : j.at("sweeps")) {
            reject_unknown(s, "sweeps[]", {"axis", "values"});
            sweep_spec spec;
            spec.axis = s.at("axis").get<std::string>();
            if (!known_axes.count(spec.axis))
                throw validation_error("config: unknown sweep axis '" + spec.axis + "'");
            spec.values = s.at("values").get<std::vector<double>>();
            if (spec.values.empty())
                throw validation_error("config: sweep over '" + spec.axis + "' has no values");
            cfg.sweeps.push_back(std::move(spec));
        }
    }
    read(j, "seed", cfg.seed);
    read(j, "output", cfg.output);
    read(j, "emit_traces", cfg.emit_traces);

    cfg.sc.validate();
    cfg.arr.validate();
    cfg.solver.validate();
    cfg.timing.validate();
    if (cfg.grid.samples_r < 1 || cfg.grid.samples_theta < 1)
        throw validation_error("config: grid sample counts must be at least 1");
    if (cfg.grid.delta_r_m < 0.0 || cfg.grid.delta_theta_deg < 0.0)
        throw validation_error("config: grid uncertainties must be non-negative");
    return cfg;
}

experiment_config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw validation_error("config: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw validation_error(std::string("config: parse error: ") + e.what());
    }
    return config_from_json(j);
}

json config_to_json(const experiment_config& cfg) {
    json j;
    j["scenario"] = {{"pmax_dbm", mw2dbm(cfg.sc.pmax_mw)},
                     {"noise_bob_dbm", mw2dbm(cfg.sc.noise_bob_mw)},
                     {"noise_eve_dbm", mw2dbm(cfg.sc.noise_eve_mw)},
                     {"bob_r_m", cfg.sc.bob.r_m},
                     {"bob_theta_deg", rad2deg(cfg.sc.bob.theta_rad)},
                     {"eve_r_m", cfg.sc.eve.r_m},
                     {"eve_theta_deg", rad2deg(cfg.sc.eve.theta_rad)},
                     {"pathloss_c_db", cfg.sc.pathloss_c_db},
                     {"pathloss_ref_m", cfg.sc.pathloss_ref_m},
                     {"alpha_bob", cfg.sc.alpha_bob},
                     {"alpha_eve", cfg.sc.alpha_eve},
                     {"c_mps", cfg.sc.c_mps}};
    j["array"] = {{"m", cfg.arr.m},
                  {"fc_hz", cfg.arr.fc_hz},
                  {"delta_f_hz", cfg.arr.delta_f_hz},
                  {"d0_m", cfg.arr.d0_m},
                  {"dmax_m", cfg.arr.dmax_m}};
    j["solver"] = {{"epsilon_bits", cfg.solver.epsilon_bits},
                   {"max_sweeps", cfg.solver.max_sweeps},
                   {"max_outer", cfg.solver.max_outer},
                   {"dx_m", cfg.solver.dx_m},
                   {"df_hz", cfg.solver.df_hz},
                   {"randomization_count", cfg.solver.randomization_count},
                   {"rank1_ratio", cfg.solver.rank1_ratio},
                   {"fw_gap_tol", cfg.solver.fw_gap_tol},
                   {"fw_max_iters", cfg.solver.fw_max_iters},
                   {"max_outer_w", cfg.solver.max_outer_w},
                   {"random_starts", cfg.solver.random_starts}};
    j["timing"] = {{"t_total_s", cfg.timing.t_total_s},
                   {"dt_crf_s", cfg.timing.dt_crf_s},
                   {"dt_brf_s", cfg.timing.dt_brf_s},
                   {"apply", cfg.apply_timing},
                   {"pairing", cfg.pairing == refresh_pairing::causal ? "causal"
                                                                      : "double_sum"}};
    j["grid"] = {{"delta_r_m", cfg.grid.delta_r_m},
                 {"delta_theta_deg", cfg.grid.delta_theta_deg},
                 {"samples_r", cfg.grid.samples_r},
                 {"samples_theta", cfg.grid.samples_theta}};
    j["csi"] = to_string(cfg.csi);
    json schemes = json::array();
    for (scheme_kind k : cfg.schemes)
        schemes.push_back(to_string(k));
    j["schemes"] = schemes;
    json sweeps = json::array();
    for (const sweep_spec& s : cfg.sweeps)
        sweeps.push_back({{"axis", s.axis}, {"values", s.values}});
    j["sweeps"] = sweeps;
    j["seed"] = cfg.seed;
    j["output"] = cfg.output;
    j["emit_traces"] = cfg.emit_traces;
    return j;
}

uncertainty_grid build_grid_from_spec(const scenario& sc, const grid_spec& spec) {
    return build_grid(sc, spec.delta_r_m, deg2rad(spec.delta_theta_deg),
                      spec.samples_r, spec.samples_theta);
}

} // namespace mfda
