// SPDX-License-Identifier: Apache-2.0

#include "mfda/orchestrate.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>

namespace mfda {

std::string to_string(scheme_kind kind) {
    switch (kind) {
    case scheme_kind::pa: return "PA";
    case scheme_kind::fda: return "FDA";
    case scheme_kind::mfda: return "MFDA";
    }
    return "?";
}

std::string to_string(csi_mode csi) {
    return csi == csi_mode::perfect ? "perfect" : "imperfect";
}

namespace {

long integral_count(double total, double step, const char* what) {
    const double ratio = total / step;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
        throw validation_error(std::string("timing: ") + what +
                               " must divide the window into a positive integer count");
    return static_cast<long>(rounded);
}

} // namespace

long timing_grid::refresh_count() const {
    return integral_count(t_total_s, dt_brf_s, "beamformer refresh interval");
}

long timing_grid::channel_count() const {
    return integral_count(t_total_s, dt_crf_s, "channel refresh interval");
}

void timing_grid::validate() const {
    if (t_total_s <= 0.0 || dt_brf_s <= 0.0 || dt_crf_s <= 0.0)
        throw validation_error("timing: intervals must be positive");
    (void)refresh_count();
    (void)channel_count();
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t point, std::uint64_t scheme) {
    // splitmix64 mix of the three values
    std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (point + 1) +
                      0xbf58476d1ce4e5b9ULL * (scheme + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

array_config scheme_initial_array(const scenario& sc, const array_config& base,
                                  scheme_kind kind) {
    array_config arr = make_reference_array(base.m, base.fc_hz, base.delta_f_hz,
                                            base.d0_m, base.dmax_m, sc);
    if (kind != scheme_kind::pa) {
        // Standard linear frequency ramp as the starting AFV.
        for (int i = 0; i < arr.m; ++i)
            arr.f[i] = arr.fc_hz + i * arr.delta_f_hz / arr.m;
    }
    arr.validate();
    return arr;
}

solver_options resolved_options(const solver_options& opts, const array_config& arr,
                                const scenario& sc) {
    solver_options out = opts;
    if (out.dx_m <= 0.0)
        out.dx_m = sc.wavelength_m(arr.fc_hz) / 20.0;
    if (out.df_hz <= 0.0)
        out.df_hz = (arr.delta_f_hz > 0.0) ? arr.delta_f_hz / 200.0 : 1.0;
    return out;
}

double perfect_capacity(const array_config& arr, const scenario& sc) {
    return std::log2(lambda_max_closed_form(channel_matrices(0.0, arr, sc), sc.pmax_mw));
}

double worst_sample_proxy_capacity(const array_config& arr, const scenario& sc,
                                   const uncertainty_grid& grid) {
    double worst = std::numeric_limits<double>::infinity();
    for (const polar_point& p : grid.samples) {
        const channel_pair pair = channel_matrices(0.0, arr, sc, p);
        worst = std::min(worst, std::log2(lambda_max_closed_form(pair, sc.pmax_mw)));
    }
    return worst;
}

struct stage1_outcome {
    array_config array;
    std::vector<sweep_trace_row> trace;
    std::vector<block_trace> blocks;
    int sweeps = 0;
    double capacity = 0.0;
};

stage1_outcome run_stage1(const array_config& init, const scenario& sc,
                          const scheme_spec& scheme, const solver_options& opts,
                          const std::optional<uncertainty_grid>& grid) {
    const bool imperfect = scheme.csi == csi_mode::imperfect;
    auto metric = [&](const array_config& a) {
        return imperfect ? worst_sample_proxy_capacity(a, sc, *grid)
                         : perfect_capacity(a, sc);
    };
    auto objective = [&](const array_config& a) {
        if (imperfect)
            return worst_case_inner_product_sq(a, sc, *grid).value -
                   static_cast<double>(a.m);
        return inner_product_sq(a, sc) - static_cast<double>(a.m);
    };

    stage1_outcome out;
    out.array = init;
    double cap_prev = metric(out.array);
    out.trace.push_back({0, objective(out.array), cap_prev});

    for (int outer = 1; outer <= opts.max_outer; ++outer) {
        if (scheme.kind == scheme_kind::mfda) {
            sweep_result pos = imperfect
                                   ? bcd_line_search_positions(out.array, sc, *grid, opts)
                                   : bsum_sweep_positions(out.array, sc, opts);
            out.array = pos.array;
            out.sweeps += pos.sweeps;
            out.blocks.push_back({"positions", outer, std::move(pos.trace)});
        }
        sweep_result freq = imperfect
                                ? bcd_line_search_frequencies(out.array, sc, *grid, opts)
                                : bsum_sweep_frequencies(out.array, sc, opts);
        out.array = freq.array;
        out.sweeps += freq.sweeps;
        out.blocks.push_back({"frequencies", outer, std::move(freq.trace)});

        const double cap = metric(out.array);
        out.trace.push_back({outer, objective(out.array), cap});
        if (!imperfect && cap < cap_prev - 1e-9)
            throw numerical_error("two_stage_ao: capacity decreased across an outer iteration");
        const bool settled = std::abs(cap - cap_prev) <= opts.epsilon_bits;
        cap_prev = cap;
        if (settled)
            break;
    }
    out.capacity = cap_prev;
    return out;
}

} // namespace

solution two_stage_ao(const scenario& sc, const array_config& base,
                      const scheme_spec& scheme, const solver_options& opts,
                      std::optional<uncertainty_grid> grid, std::uint64_t seed) {
    sc.validate();
    base.validate();
    const bool imperfect = scheme.csi == csi_mode::imperfect;
    if (imperfect && !grid)
        throw validation_error("two_stage_ao: imperfect CSI requires an uncertainty grid");
    if (!imperfect && grid)
        throw validation_error("two_stage_ao: perfect CSI must not pass an uncertainty grid");

    const array_config init = scheme_initial_array(sc, base, scheme.kind);
    const solver_options ropts = resolved_options(opts, init, sc);

    solution sol;
    if (scheme.kind == scheme_kind::pa) {
        sol.array = init;
    } else {
        stage1_outcome best = run_stage1(init, sc, scheme, ropts, grid);
        for (int start = 1; start <= ropts.random_starts; ++start) {
            array_config rand_init =
                random_feasible_array(init, sc, derive_seed(seed, start, 101));
            if (scheme.kind == scheme_kind::fda)
                rand_init.x = init.x; // FDA never moves elements
            stage1_outcome cand = run_stage1(rand_init, sc, scheme, ropts, grid);
            if (cand.capacity > best.capacity)
                best = std::move(cand);
        }
        sol.array = best.array;
        sol.stage1_trace = std::move(best.trace);
        sol.block_traces = std::move(best.blocks);
        sol.iterations_stage1 = best.sweeps;
    }

    if (!imperfect) {
        const channel_pair pair = channel_matrices(0.0, sol.array, sc);
        sol.w = optimal_abv(pair, sc.pmax_mw);
        sol.capacity_bits = secrecy_capacity_instant(sol.w, pair);
        sol.iterations_stage2 = 1;
        sol.rank1 = true;
    } else {
        const channel_pair nominal = channel_matrices(0.0, sol.array, sc);
        std::vector<herm_mat> b_samples;
        b_samples.reserve(grid->samples.size());
        for (const polar_point& p : grid->samples)
            b_samples.push_back(channel_matrices(0.0, sol.array, sc, p).b);
        robust_solution rs =
            robust_abv_solve(nominal.a, b_samples, sc.pmax_mw, ropts, seed);
        sol.w = rs.w;
        // The null beamformer always achieves zero, so never report less.
        sol.capacity_bits = std::max(0.0, rs.capacity_bits);
        sol.stage2_trace = std::move(rs.trace);
        sol.iterations_stage2 = rs.iterations;
        sol.rank1 = rs.rank1;
    }
    return sol;
}

double time_avg_secrecy_capacity(const solution& sol, const scenario& sc,
                                 const timing_grid& timing, refresh_pairing pairing) {
    timing.validate();
    const long k_count = timing.refresh_count();
    const long l_count = timing.channel_count();
    const array_config& arr = sol.array;

    std::map<long, beamformer> refresh_cache;
    auto beamformer_at = [&](long k) -> const beamformer& {
        auto it = refresh_cache.find(k);
        if (it == refresh_cache.end()) {
            const double t_k = static_cast<double>(k) * timing.t_total_s / k_count;
            it = refresh_cache
                     .emplace(k, optimal_abv(channel_matrices(t_k, arr, sc), sc.pmax_mw))
                     .first;
        }
        return it->second;
    };

    auto capacity_term = [&](const beamformer& bf, const channel_pair& pair) {
        const double num = 1.0 + pair.a.quad_form(bf.w);
        const double den = 1.0 + pair.b.quad_form(bf.w);
        return std::log2(num / den);
    };

    double total = 0.0;
    for (long l = 0; l < l_count; ++l) {
        const double t_l = static_cast<double>(l) * timing.t_total_s / l_count;
        const channel_pair pair = channel_matrices(t_l, arr, sc);
        if (pairing == refresh_pairing::causal) {
            const long k = (l * k_count) / l_count; // most recent refresh <= t_l
            total += capacity_term(beamformer_at(k), pair);
        } else {
            for (long k = 0; k < k_count; ++k)
                total += capacity_term(beamformer_at(k), pair);
        }
    }
    const double pairs = (pairing == refresh_pairing::causal)
                             ? static_cast<double>(l_count)
                             : static_cast<double>(l_count) * k_count;
    return total / pairs;
}

scheme_report run_scheme(const scheme_spec& scheme, const scenario& sc,
                         const array_config& base, const solver_options& opts,
                         std::optional<timing_grid> timing,
                         std::optional<uncertainty_grid> grid, std::uint64_t seed,
                         refresh_pairing pairing) {
    scheme_report rep;
    rep.scheme = scheme;
    rep.seed = seed;
    rep.upper_bound = upper_bound_bits(base.m, sc);

    const auto t0 = std::chrono::steady_clock::now();
    try {
        rep.sol = two_stage_ao(sc, base, scheme, opts,
                               scheme.csi == csi_mode::imperfect ? grid : std::nullopt,
                               seed);
        rep.ideal_capacity_bits = rep.sol.capacity_bits;
        rep.capacity_bits = rep.sol.capacity_bits;
        if (timing && scheme.csi == csi_mode::perfect)
            rep.capacity_bits = time_avg_secrecy_capacity(rep.sol, sc, *timing, pairing);
        rep.iterations_stage1 = rep.sol.iterations_stage1;
        rep.iterations_stage2 = rep.sol.iterations_stage2;
    } catch (const std::exception& e) {
        rep.status = e.what();
        rep.capacity_bits = 0.0;
        rep.ideal_capacity_bits = 0.0;
    }
    const auto t1 = std::chrono::steady_clock::now();
    rep.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return rep;
}

} // namespace mfda
