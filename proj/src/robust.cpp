// SPDX-License-Identifier: Apache-2.0

#include "mfda/robust.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace mfda {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double herm_prod_trace(const herm_mat& lhs, const herm_mat& rhs) {
    return lhs.mat().cwiseProduct(rhs.mat().conjugate()).sum().real();
}

double log2_capacity(double tr_a, double tr_b) {
    return std::log2(1.0 + tr_a) - std::log2(1.0 + tr_b);
}

} // namespace

uncertainty_grid build_grid(const scenario& sc, double delta_r_m,
                            double delta_theta_rad, int ny, int nz) {
    if (ny < 1 || nz < 1)
        throw validation_error("build_grid: sample counts must be at least 1");
    if (delta_r_m < 0.0 || delta_theta_rad < 0.0)
        throw validation_error("build_grid: uncertainty extents must be non-negative");
    if (delta_r_m >= sc.eve.r_m)
        throw validation_error("build_grid: range uncertainty reaches non-positive distances");

    uncertainty_grid grid;
    grid.delta_r_m = delta_r_m;
    grid.delta_theta_rad = delta_theta_rad;
    grid.ny = ny;
    grid.nz = nz;
    grid.samples.reserve(static_cast<std::size_t>(ny) * nz);
    for (int y = 0; y < ny; ++y) {
        const double r = (ny == 1)
                             ? sc.eve.r_m
                             : sc.eve.r_m - delta_r_m + y * 2.0 * delta_r_m / (ny - 1);
        for (int z = 0; z < nz; ++z) {
            const double th = (nz == 1)
                                  ? sc.eve.theta_rad
                                  : sc.eve.theta_rad - delta_theta_rad +
                                        z * 2.0 * delta_theta_rad / (nz - 1);
            grid.samples.push_back({r, th});
        }
    }
    return grid;
}

worst_sample worst_case_inner_product_sq(const array_config& arr, const scenario& sc,
                                         const uncertainty_grid& grid) {
    worst_sample out;
    bool first = true;
    for (int y = 0; y < grid.ny; ++y) {
        for (int z = 0; z < grid.nz; ++z) {
            const polar_point& p = grid.at(y, z);
            const double val = inner_product_sq(arr, sc, p);
            if (first || val > out.value) {
                out = {val, p, y, z};
                first = false;
            }
        }
    }
    return out;
}

namespace {

// Worst-sample capacity reachable with the ideal per-sample beamformer,
// used as the convergence metric of the line searches.
double worst_sample_capacity(const array_config& arr, const scenario& sc,
                             const uncertainty_grid& grid) {
    double worst = std::numeric_limits<double>::infinity();
    for (const polar_point& p : grid.samples) {
        const channel_pair pair = channel_matrices(0.0, arr, sc, p);
        worst = std::min(worst, std::log2(lambda_max_closed_form(pair, sc.pmax_mw)));
    }
    return worst;
}

struct line_searcher {
    const scenario& sc;
    const uncertainty_grid& grid;
    const solver_options& opts;
    bool positions = true;

    // Per-sample tau slope/offset so candidate phases are O(1) to form.
    std::vector<double> slope, offset;

    explicit line_searcher(const scenario& s, const uncertainty_grid& g,
                           const solver_options& o, bool pos)
        : sc(s), grid(g), opts(o), positions(pos) {
        slope.reserve(g.samples.size());
        offset.reserve(g.samples.size());
        const double sin_b = std::sin(sc.bob.theta_rad);
        for (const polar_point& p : g.samples) {
            slope.push_back((std::sin(p.theta_rad) - sin_b) / sc.c_mps);
            offset.push_back((sc.bob.r_m - p.r_m) / sc.c_mps);
        }
    }

    // Worst-sample inner product as a function of element i's coordinate,
    // split into a fixed part and the 2 sum cos(...) cross terms so each
    // candidate costs O(M) per sample.
    double step(array_config& arr, int i) const {
        const int ns = static_cast<int>(grid.samples.size());
        const int m = arr.m;

        std::vector<std::vector<double>> phases(ns, std::vector<double>(m));
        std::vector<double> fixed(ns, static_cast<double>(m));
        for (int s = 0; s < ns; ++s) {
            for (int n = 0; n < m; ++n)
                phases[s][n] = arr.f[n] * (arr.x[n] * slope[s] + offset[s]);
            for (int p = 0; p < m; ++p) {
                if (p == i)
                    continue;
                for (int n = p + 1; n < m; ++n) {
                    if (n == i)
                        continue;
                    fixed[s] += 2.0 * std::cos(two_pi * (phases[s][p] - phases[s][n]));
                }
            }
        }

        auto worst_at = [&](double v) {
            double worst = -std::numeric_limits<double>::infinity();
            for (int s = 0; s < ns; ++s) {
                const double phase_i = positions
                                           ? arr.f[i] * (v * slope[s] + offset[s])
                                           : v * (arr.x[i] * slope[s] + offset[s]);
                double val = fixed[s];
                for (int n = 0; n < m; ++n) {
                    if (n == i)
                        continue;
                    val += 2.0 * std::cos(two_pi * (phase_i - phases[s][n]));
                }
                worst = std::max(worst, val);
            }
            return worst;
        };

        double lower, upper, step_len;
        const double current = positions ? arr.x[i] : arr.f[i];
        if (positions) {
            lower = arr.x[i - 1] + arr.d0_m;
            upper = arr.dmax_m - (m - 1 - i) * arr.d0_m;
            if (i + 1 < m)
                upper = std::min(upper, arr.x[i + 1] - arr.d0_m);
            step_len = opts.dx_m;
        } else {
            lower = arr.fc_hz;
            upper = arr.fc_hz + arr.delta_f_hz;
            step_len = opts.df_hz;
        }

        double best = std::clamp(current, lower, upper);
        if (upper - lower < step_len)
            return best; // window narrower than the step: stay put

        double best_val = worst_at(best);
        for (double v = lower; v <= upper + 1e-12 * std::max(1.0, std::abs(upper));
             v += step_len) {
            const double val = worst_at(v);
            if (val < best_val) {
                best_val = val;
                best = v;
            }
        }
        const double val_up = worst_at(upper);
        if (val_up < best_val)
            best = upper;
        return best;
    }

    sweep_result run(const array_config& start) const {
        start.validate();
        opts.validate();
        if (grid.samples.empty())
            throw validation_error("line search: empty sample grid");

        sweep_result res;
        res.array = start;

        double prev_obj = worst_case_inner_product_sq(res.array, sc, grid).value -
                          static_cast<double>(start.m);
        double prev_cap = worst_sample_capacity(res.array, sc, grid);
        res.trace.push_back({0, prev_obj, prev_cap});
        if (start.m == 1)
            return res;

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

            const double obj = worst_case_inner_product_sq(res.array, sc, grid).value -
                               static_cast<double>(start.m);
            const double cap = worst_sample_capacity(res.array, sc, grid);
            res.trace.push_back({sweep, obj, cap});
            if (obj > prev_obj + 1e-9)
                throw numerical_error("line search: worst-case objective increased");
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

sweep_result bcd_line_search_positions(const array_config& arr, const scenario& sc,
                                       const uncertainty_grid& grid,
                                       const solver_options& opts) {
    if (opts.dx_m <= 0.0)
        throw validation_error("bcd_line_search_positions: dx must be positive");
    const double d1_last = arr.dmax_m; // element M always has room up to Dmax
    if (arr.m > 1 && arr.x[arr.m - 2] + arr.d0_m > d1_last + 1e-12)
        throw validation_error("bcd_line_search_positions: empty feasible interval");
    line_searcher searcher(sc, grid, opts, true);
    return searcher.run(arr);
}

sweep_result bcd_line_search_frequencies(const array_config& arr, const scenario& sc,
                                         const uncertainty_grid& grid,
                                         const solver_options& opts) {
    if (opts.df_hz <= 0.0)
        throw validation_error("bcd_line_search_frequencies: df must be positive");
    line_searcher searcher(sc, grid, opts, false);
    return searcher.run(arr);
}

double lemma2_u_opt(const herm_mat& b_yz, const herm_mat& w_cov) {
    return 1.0 / (herm_prod_trace(b_yz, w_cov) + 1.0);
}

namespace {

// Smoothed max of the auxiliary constraint values; the temperature is
// annealed so early iterations see a soft landscape and late ones track
// the true worst sample closely.
double log_sum_exp(const std::vector<double>& vals, double temp) {
    const double top = *std::max_element(vals.begin(), vals.end());
    double sum = 0.0;
    for (double v : vals)
        sum += std::exp(temp * (v - top));
    return top + std::log(sum) / temp;
}

void softmax_into(const std::vector<double>& vals, double temp, std::vector<double>& out) {
    const double top = *std::max_element(vals.begin(), vals.end());
    double sum = 0.0;
    out.resize(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        out[i] = std::exp(temp * (vals[i] - top));
        sum += out[i];
    }
    for (double& v : out)
        v /= sum;
}

struct fw_state {
    Eigen::MatrixXcd w;           // current covariance iterate
    double tr_a = 0.0;            // tr(A W)
    std::vector<double> tr_b;     // tr(B_s W)
};

class relaxed_solver {
public:
    relaxed_solver(const herm_mat& a, const std::vector<herm_mat>& b_samples,
                   double pmax, const solver_options& opts)
        : a_(a), b_(b_samples), pmax_(pmax), opts_(opts) {}

    // ln(1 + tr(A W)) - lse_T of the auxiliary terms, for fixed u.
    double smoothed_value(const fw_state& st, const std::vector<double>& u,
                          double temp) const {
        std::vector<double> ell(b_.size());
        for (std::size_t s = 0; s < b_.size(); ++s)
            ell[s] = u[s] * (st.tr_b[s] + 1.0) - std::log(u[s]) - 1.0;
        return std::log1p(st.tr_a) - log_sum_exp(ell, temp);
    }

    void refresh_traces(fw_state& st) const {
        const herm_mat wmat{st.w};
        st.tr_a = herm_prod_trace(a_, wmat);
        for (std::size_t s = 0; s < b_.size(); ++s)
            st.tr_b[s] = herm_prod_trace(b_[s], wmat);
    }

    // One annealing stage of conditional-gradient ascent at temperature T.
    void fw_stage(fw_state& st, const std::vector<double>& u, double temp,
                  int max_iters) const {
        const Eigen::Index m = st.w.rows();
        std::vector<double> ell(b_.size()), weights;
        for (int iter = 0; iter < max_iters; ++iter) {
            for (std::size_t s = 0; s < b_.size(); ++s)
                ell[s] = u[s] * (st.tr_b[s] + 1.0) - std::log(u[s]) - 1.0;
            softmax_into(ell, temp, weights);

            Eigen::MatrixXcd grad = a_.mat() / (1.0 + st.tr_a);
            for (std::size_t s = 0; s < b_.size(); ++s)
                grad -= weights[s] * u[s] * b_[s].mat();
            grad = 0.5 * (grad + grad.adjoint().eval());

            const eig_pair lead = leading_eigpair(herm_mat{grad});
            const bool use_vertex = lead.value > 0.0;
            const double tr_grad_w =
                grad.cwiseProduct(st.w.conjugate()).sum().real();
            const double gap =
                (use_vertex ? pmax_ * lead.value : 0.0) - tr_grad_w;
            if (gap <= opts_.fw_gap_tol)
                break;

            // Direction endpoint and its trace products.
            double tr_a_s = 0.0;
            std::vector<double> tr_b_s(b_.size(), 0.0);
            if (use_vertex) {
                tr_a_s = pmax_ * a_.quad_form(lead.vector);
                for (std::size_t s = 0; s < b_.size(); ++s)
                    tr_b_s[s] = pmax_ * b_[s].quad_form(lead.vector);
            }

            const double gamma =
                line_search(st, u, temp, tr_a_s, tr_b_s);
            if (use_vertex) {
                st.w = (1.0 - gamma) * st.w +
                       gamma * pmax_ * (lead.vector * lead.vector.adjoint());
            } else {
                st.w *= (1.0 - gamma);
            }
            st.tr_a = (1.0 - gamma) * st.tr_a + gamma * tr_a_s;
            for (std::size_t s = 0; s < b_.size(); ++s)
                st.tr_b[s] = (1.0 - gamma) * st.tr_b[s] + gamma * tr_b_s[s];

            if (iter % 25 == 24) {
                try_rank1_round(st, u, temp);
                refresh_traces(st); // clear accumulated drift
            }
        }
        try_rank1_round(st, u, temp);
    }

    // Exact-ish 1D maximization along the segment towards the vertex; the
    // restriction is concave, so bisect on the sign of the derivative.
    double line_search(const fw_state& st, const std::vector<double>& u, double temp,
                       double tr_a_s, const std::vector<double>& tr_b_s) const {
        const double da = tr_a_s - st.tr_a;
        std::vector<double> ell(b_.size()), weights;
        auto deriv = [&](double g) {
            double val = da / (1.0 + st.tr_a + g * da);
            for (std::size_t s = 0; s < b_.size(); ++s)
                ell[s] = u[s] * (st.tr_b[s] + g * (tr_b_s[s] - st.tr_b[s]) + 1.0) -
                         std::log(u[s]) - 1.0;
            softmax_into(ell, temp, weights);
            for (std::size_t s = 0; s < b_.size(); ++s)
                val -= weights[s] * u[s] * (tr_b_s[s] - st.tr_b[s]);
            return val;
        };
        if (deriv(1.0) >= 0.0)
            return 1.0;
        if (deriv(0.0) <= 0.0)
            return 0.0;
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (deriv(mid) > 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    // Replacing the iterate with a rank-one matrix along its leading
    // eigenvector often jumps straight to the relaxed optimum, which is
    // rank one in the regimes this solver targets.
    void try_rank1_round(fw_state& st, const std::vector<double>& u, double temp) const {
        const eig_pair lead = leading_eigpair(herm_mat{st.w});
        if (lead.value <= 0.0)
            return;
        const double base = smoothed_value(st, u, temp);
        for (const double scale : {st.w.trace().real(), pmax_}) {
            if (scale <= 0.0 || scale > pmax_ * (1.0 + 1e-12))
                continue;
            fw_state cand;
            cand.w = scale * (lead.vector * lead.vector.adjoint());
            cand.tr_b.assign(b_.size(), 0.0);
            cand.tr_a = scale * a_.quad_form(lead.vector);
            for (std::size_t s = 0; s < b_.size(); ++s)
                cand.tr_b[s] = scale * b_[s].quad_form(lead.vector);
            if (smoothed_value(cand, u, temp) > base + 1e-15)
                st = std::move(cand);
        }
    }

    double true_capacity(const fw_state& st) const {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < b_.size(); ++s)
            worst = std::min(worst, log2_capacity(st.tr_a, st.tr_b[s]));
        return worst;
    }

private:
    const herm_mat& a_;
    const std::vector<herm_mat>& b_;
    double pmax_;
    const solver_options& opts_;
};

} // namespace

robust_solution robust_abv_solve(const herm_mat& a, const std::vector<herm_mat>& b_samples,
                                 double pmax_mw, const solver_options& opts,
                                 std::uint64_t seed) {
    if (b_samples.empty())
        throw validation_error("robust_abv_solve: need at least one eavesdropper sample");
    if (pmax_mw <= 0.0)
        throw validation_error("robust_abv_solve: Pmax must be positive");
    opts.validate();

    const Eigen::Index m = a.dim();
    relaxed_solver solver(a, b_samples, pmax_mw, opts);

    // Start from the full-power transmit direction that maximizes the
    // legitimate link; the alternation reshapes it against the samples.
    fw_state st;
    st.tr_b.assign(b_samples.size(), 0.0);
    {
        const eig_pair lead = leading_eigpair(a);
        st.w = pmax_mw * (lead.vector * lead.vector.adjoint());
        solver.refresh_traces(st);
    }

    static constexpr double anneal[] = {10.0, 31.6, 100.0, 316.0, 1000.0};

    robust_solution sol;
    double cap_prev = solver.true_capacity(st);
    std::vector<double> u(b_samples.size(), 1.0);

    int outer = 0;
    for (outer = 1; outer <= opts.max_outer_w; ++outer) {
        for (std::size_t s = 0; s < b_samples.size(); ++s)
            u[s] = 1.0 / (st.tr_b[s] + 1.0);

        fw_state trial = st;
        for (double temp : anneal) {
            const bool last = (temp == anneal[std::size(anneal) - 1]);
            solver.fw_stage(trial, u, temp,
                            last ? 4 * opts.fw_max_iters : opts.fw_max_iters);
        }
        solver.refresh_traces(trial);

        const double cap_new = solver.true_capacity(trial);
        if (cap_new < cap_prev - 1e-12) {
            // The smoothed step regressed the true objective; keep the
            // previous iterate and stop.
            break;
        }
        st = std::move(trial);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(st.w);
        const Eigen::VectorXd evals = es.eigenvalues();
        const double ratio = (evals(m - 1) > 0.0 && m > 1)
                                 ? std::max(0.0, evals(m - 2)) / evals(m - 1)
                                 : 0.0;
        sol.trace.push_back({outer, cap_new, st.w.trace().real(), ratio});

        const bool settled = std::abs(cap_new - cap_prev) <= opts.epsilon_bits;
        cap_prev = cap_new;
        if (settled)
            break;
    }
    sol.iterations = std::min(outer, opts.max_outer_w);
    sol.w_cov = herm_mat{st.w};

    // Beamformer recovery: eigenvector when the covariance is numerically
    // rank one, Gaussian randomization otherwise.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(st.w);
    const Eigen::VectorXd evals = es.eigenvalues();
    const double top = evals(m - 1);
    const double second = (m > 1) ? std::max(0.0, evals(m - 2)) : 0.0;

    auto worst_capacity = [&](const complex_vec& w) {
        const double num = a.quad_form(w);
        double worst = std::numeric_limits<double>::infinity();
        for (const herm_mat& b : b_samples)
            worst = std::min(worst, log2_capacity(num, b.quad_form(w)));
        return worst;
    };

    if (top <= 0.0) {
        sol.rank1 = true;
        sol.w = {complex_vec::Zero(m), pmax_mw};
        sol.capacity_bits = 0.0;
        return sol;
    }

    if (second / top < opts.rank1_ratio) {
        sol.rank1 = true;
        complex_vec v = canonical_phase(es.eigenvectors().col(m - 1));
        sol.w = {std::sqrt(top) * v, pmax_mw};
    } else {
        sol.w = gaussian_randomization(sol.w_cov, worst_capacity,
                                       opts.randomization_count, seed, pmax_mw);
    }
    sol.capacity_bits = worst_capacity(sol.w.w);
    return sol;
}

beamformer gaussian_randomization(const herm_mat& w_cov,
                                  const std::function<double(const complex_vec&)>& objective,
                                  int n, std::uint64_t seed, double pmax_mw) {
    if (n < 1)
        throw validation_error("gaussian_randomization: need at least one candidate");
    const Eigen::Index m = w_cov.dim();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w_cov.mat());
    Eigen::VectorXd evals = es.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXcd factor =
        es.eigenvectors() * evals.cwiseSqrt().asDiagonal();

    // Hand-rolled Box-Muller keeps the draw sequence identical across
    // standard library implementations.
    std::mt19937_64 rng(seed);
    auto unit = [&rng]() {
        return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    };
    auto complex_normal = [&]() {
        const double radius = std::sqrt(-std::log(unit()));
        const double angle = two_pi * unit();
        return cxd(radius * std::cos(angle), radius * std::sin(angle));
    };

    complex_vec best;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        complex_vec g(m);
        for (Eigen::Index j = 0; j < m; ++j)
            g(j) = complex_normal();
        complex_vec z = factor * g;
        const double norm = z.norm();
        if (norm <= 0.0)
            continue;
        z *= std::sqrt(pmax_mw) / norm;
        const double val = objective(z);
        if (val > best_val) {
            best_val = val;
            best = z;
        }
    }
    if (best.size() == 0) {
        // Degenerate covariance: fall back to the leading direction.
        best = std::sqrt(pmax_mw) * canonical_phase(es.eigenvectors().col(m - 1));
    }
    return {canonical_phase(best), pmax_mw};
}

} // namespace mfda
