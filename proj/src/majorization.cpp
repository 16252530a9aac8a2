// SPDX-License-Identifier: Apache-2.0

#include "mfda/majorization.hpp"

#include "mfda/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace mfda {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double pi = std::numbers::pi;

double pairwise_cos_objective(const array_config& arr, const scenario& sc) {
    return inner_product_sq(arr, sc) - static_cast<double>(arr.m);
}

double capacity_bits_at(const array_config& arr, const scenario& sc) {
    const channel_pair pair = channel_matrices(0.0, arr, sc);
    return std::log2(lambda_max_closed_form(pair, sc.pmax_mw));
}

// Sum over n != i of cos(2 pi (phase_i - phase_n)) for a candidate value
// of element i's own phase product.
double element_cos_sum(const std::vector<double>& phases, int i, double phase_i) {
    double sum = 0.0;
    for (int n = 0; n < static_cast<int>(phases.size()); ++n) {
        if (n == i)
            continue;
        sum += std::cos(two_pi * (phase_i - phases[n]));
    }
    return sum;
}

double surrogate_value(const std::vector<majorizer>& majs, double v) {
    double sum = 0.0;
    for (const majorizer& mj : majs) {
        const double d = v - mj.zeta;
        sum += mj.k * d * d + mj.delta;
    }
    return sum;
}

} // namespace

void solver_options::validate() const {
    if (epsilon_bits <= 0.0)
        throw validation_error("solver: convergence threshold must be positive");
    if (max_sweeps < 1 || max_outer < 1 || max_outer_w < 1)
        throw validation_error("solver: iteration caps must be positive");
    if (dx_m < 0.0 || df_hz < 0.0)
        throw validation_error("solver: search steps must be non-negative");
    if (randomization_count < 1)
        throw validation_error("solver: randomization count must be at least 1");
    if (rank1_ratio <= 0.0 || fw_gap_tol <= 0.0 || fw_max_iters < 1)
        throw validation_error("solver: relaxed-solver knobs must be positive");
    if (random_starts < 0)
        throw validation_error("solver: random start count must be non-negative");
}

majorizer majorize_cosine_at(double v0, double rate, double offset) {
    const double g = rate * v0 - offset;
    const double y = std::cos(two_pi * g);
    const double dy = -two_pi * rate * std::sin(two_pi * g);

    majorizer out;
    if (std::abs(dy) < 1e-9) {
        // Stationary expansion point: curvature from the second-order
        // limit, sign chosen by whether we sit at a minimum or maximum.
        if (y < 0.0) {
            out.k = 2.0 * pi * pi * rate * rate;
            out.zeta = v0;
            out.delta = -1.0;
        } else {
            out.k = -2.0 * pi * pi * rate * rate;
            out.zeta = v0;
            out.delta = 1.0;
        }
        return out;
    }

    // Vertex at the nearest cosine minimum in the descent direction: the
    // odd member of {floor(2g), ceil(2g)} marks that minimum, for either
    // sign of the rate.
    double k2 = std::floor(2.0 * g);
    if ((static_cast<long long>(k2) & 1LL) == 0)
        k2 += 1.0;
    out.zeta = (0.5 * k2 + offset) / rate;
    out.k = -pi * rate * std::sin(two_pi * g) / (v0 - out.zeta);
    out.delta = y - out.k * (v0 - out.zeta) * (v0 - out.zeta);
    return out;
}

majorizer cosine_majorizer(double tau_m, double tau_n, double f_m, double f_n) {
    if (f_m <= 0.0)
        throw validation_error("cosine_majorizer: f_m must be positive");
    return majorize_cosine_at(tau_m, f_m, tau_n * f_n);
}

double bsum_tau_update(const std::vector<majorizer>& majorizers) {
    if (majorizers.empty())
        throw validation_error("bsum_tau_update: no majorizers");
    double sum_k = 0.0;
    double sum_kz = 0.0;
    for (const majorizer& mj : majorizers) {
        sum_k += mj.k;
        sum_kz += mj.k * mj.zeta;
    }
    if (sum_k <= 0.0)
        throw numerical_error("bsum_tau_update: non-positive total curvature");
    return sum_kz / sum_k;
}

double clamp_position(double tau_opt, int index, double x_prev,
                      const array_config& arr, const scenario& sc) {
    if (index == 0)
        return 0.0;
    const double slope = std::sin(sc.eve.theta_rad) - std::sin(sc.bob.theta_rad);
    if (slope == 0.0)
        throw validation_error("clamp_position: equal sines, position cannot change the delays");
    const double x_raw =
        (tau_opt - (sc.bob.r_m - sc.eve.r_m) / sc.c_mps) * sc.c_mps / slope;
    const double d1 = arr.dmax_m - (arr.m - 1 - index) * arr.d0_m;
    if (x_raw <= x_prev + arr.d0_m)
        return x_prev + arr.d0_m;
    if (x_raw > d1)
        return d1;
    return x_raw;
}

namespace {

struct block_sweeper {
    const scenario& sc;
    const solver_options& opts;
    bool positions = true; // false: frequencies

    // One block-coordinate step on element i. Returns the new value of
    // the coordinate (position or frequency).
    double step(array_config& arr, int i) const {
        const std::vector<double> taus = tau_vector(arr, sc);
        std::vector<double> phases(arr.m);
        for (int n = 0; n < arr.m; ++n)
            phases[n] = arr.f[n] * taus[n];

        const double current = positions ? arr.x[i] : arr.f[i];
        const double rate = positions ? arr.f[i] : taus[i];
        if (!positions && rate == 0.0)
            return current; // frequency has no effect on a zero delay

        std::vector<majorizer> majs;
        majs.reserve(arr.m - 1);
        bool all_positive = true;
        double sum_k = 0.0;
        for (int n = 0; n < arr.m; ++n) {
            if (n == i)
                continue;
            const double v0 = positions ? taus[i] : arr.f[i];
            majs.push_back(majorize_cosine_at(v0, rate, phases[n]));
            sum_k += majs.back().k;
            if (majs.back().k <= 0.0)
                all_positive = false;
        }

        double lower, upper;
        if (positions) {
            lower = arr.x[i - 1] + arr.d0_m;
            upper = arr.dmax_m - (arr.m - 1 - i) * arr.d0_m;
            if (i + 1 < arr.m)
                upper = std::min(upper, arr.x[i + 1] - arr.d0_m);
        } else {
            lower = arr.fc_hz;
            upper = arr.fc_hz + arr.delta_f_hz;
        }

        std::vector<double> candidates{current};
        double surrogate_candidate = current;
        bool have_surrogate = false;
        if (sum_k > 0.0) {
            const double v_opt = bsum_tau_update(majs);
            double cand;
            if (positions) {
                cand = clamp_position(v_opt, i, arr.x[i - 1], arr, sc);
                cand = std::min(cand, upper);
                cand = std::max(cand, lower);
            } else {
                cand = std::clamp(v_opt, lower, upper);
            }
            candidates.push_back(cand);
            surrogate_candidate = cand;
            have_surrogate = true;
        } else {
            // Degenerate curvature: the weighted mean is meaningless, so
            // fall back to the feasible endpoints plus the current value.
            candidates.push_back(lower);
            candidates.push_back(upper);
        }

        auto phase_of = [&](double v) {
            if (positions) {
                const double slope =
                    (std::sin(sc.eve.theta_rad) - std::sin(sc.bob.theta_rad)) / sc.c_mps;
                const double offset = (sc.bob.r_m - sc.eve.r_m) / sc.c_mps;
                return arr.f[i] * (v * slope + offset);
            }
            return v * taus[i];
        };

        double best = current;
        double best_obj = element_cos_sum(phases, i, phase_of(current));
        for (std::size_t c = 1; c < candidates.size(); ++c) {
            const double obj = element_cos_sum(phases, i, phase_of(candidates[c]));
            if (obj < best_obj) {
                best_obj = obj;
                best = candidates[c];
            }
        }

        if (have_surrogate && all_positive && best == surrogate_candidate) {
            // The accepted point must stay below the surrogate, otherwise
            // the majorizer construction is broken.
            const double v_dom = positions ? tau_of_position(best) : best;
            const double y_val = element_cos_sum(phases, i, phase_of(best));
            const double u_val = surrogate_value(majs, v_dom);
            if (y_val > u_val + 1e-9)
                throw numerical_error("bsum step: surrogate no longer dominates the objective");
        }
        return best;
    }

    double tau_of_position(double x_val) const {
        const double slope =
            (std::sin(sc.eve.theta_rad) - std::sin(sc.bob.theta_rad)) / sc.c_mps;
        const double offset = (sc.bob.r_m - sc.eve.r_m) / sc.c_mps;
        return x_val * slope + offset;
    }

    sweep_result run(const array_config& start) const {
        start.validate();
        opts.validate();
        sweep_result res;
        res.array = start;

        if (positions) {
            const double slope =
                std::sin(sc.eve.theta_rad) - std::sin(sc.bob.theta_rad);
            if (slope == 0.0 || start.m == 1) {
                res.no_effect = (slope == 0.0 && start.m > 1);
                res.trace.push_back({0, pairwise_cos_objective(start, sc),
                                     capacity_bits_at(start, sc)});
                return res;
            }
        } else {
            const std::vector<double> taus = tau_vector(start, sc);
            const bool all_zero =
                std::all_of(taus.begin(), taus.end(), [](double t) { return t == 0.0; });
            if (all_zero || start.m == 1) {
                res.no_effect = (all_zero && start.m > 1);
                res.trace.push_back({0, pairwise_cos_objective(start, sc),
                                     capacity_bits_at(start, sc)});
                return res;
            }
        }

        double prev_obj = pairwise_cos_objective(res.array, sc);
        double prev_cap = capacity_bits_at(res.array, sc);
        res.trace.push_back({0, prev_obj, prev_cap});

        for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
            for (int i = positions ? 1 : 0; i < res.array.m; ++i) {
                const double v = step(res.array, i);
                if (positions)
                    res.array.x[i] = v;
                else
                    res.array.f[i] = v;
            }
            res.array.validate();
            res.sweeps = sweep;

            const double obj = pairwise_cos_objective(res.array, sc);
            const double cap = capacity_bits_at(res.array, sc);
            res.trace.push_back({sweep, obj, cap});
            if (obj > prev_obj + 1e-9)
                throw numerical_error("bsum sweep: objective increased across a sweep");
            const bool settled = std::abs(cap - prev_cap) <= opts.epsilon_bits;
            prev_obj = obj;
            prev_cap = cap;
            if (settled) {
                res.converged = true;
                break;
            }
        }
        return res;
    }
};

} // namespace

sweep_result bsum_sweep_positions(const array_config& arr, const scenario& sc,
                                  const solver_options& opts) {
    block_sweeper sweeper{sc, opts, true};
    return sweeper.run(arr);
}

sweep_result bsum_sweep_frequencies(const array_config& arr, const scenario& sc,
                                    const solver_options& opts) {
    block_sweeper sweeper{sc, opts, false};
    return sweeper.run(arr);
}

array_config random_feasible_array(const array_config& like, const scenario& sc,
                                   std::uint64_t seed) {
    (void)sc;
    array_config arr = like;
    const double slack = arr.dmax_m - (arr.m - 1) * arr.d0_m;
    if (slack < 0.0)
        throw validation_error("random_feasible_array: spacing budget infeasible");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<double> weights(arr.m - 1);
    double total = 0.0;
    for (double& w : weights) {
        w = unit(rng);
        total += w;
    }
    const double used = unit(rng); // fraction of the slack actually spent
    arr.x[0] = 0.0;
    for (int i = 1; i < arr.m; ++i) {
        const double extra = (total > 0.0) ? slack * used * weights[i - 1] / total : 0.0;
        arr.x[i] = arr.x[i - 1] + arr.d0_m + extra;
    }
    for (int i = 0; i < arr.m; ++i)
        arr.f[i] = arr.fc_hz + unit(rng) * arr.delta_f_hz;
    arr.validate();
    return arr;
}

} // namespace mfda
