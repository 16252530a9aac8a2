// SPDX-License-Identifier: Apache-2.0
//
// Worst-case design under eavesdropper location uncertainty: a discrete
// sample grid over the suspicious region, per-element line searches
// against the worst sample, and the relaxed covariance solver with
// Gaussian randomization for beamformer recovery.

#ifndef MFDA_ROBUST_HPP
#define MFDA_ROBUST_HPP

#include "mfda/beamforming.hpp"
#include "mfda/majorization.hpp"

#include <cstdint>
#include <functional>
#include <utility>

namespace mfda {

/// Uniform samples over [r_e - dr, r_e + dr] x [theta_e - dt, theta_e + dt].
/// A single-sample axis collapses to the center value. Samples are stored
/// range-major: index = y * nz + z.
struct uncertainty_grid {
    double delta_r_m = 0.0;
    double delta_theta_rad = 0.0;
    int ny = 1;
    int nz = 1;
    std::vector<polar_point> samples;

    int count() const { return ny * nz; }
    const polar_point& at(int y, int z) const { return samples[y * nz + z]; }
};

uncertainty_grid build_grid(const scenario& sc, double delta_r_m,
                            double delta_theta_rad, int ny, int nz);

struct worst_sample {
    double value = 0.0;
    polar_point sample;
    int y = 0;
    int z = 0;
};

/// Maximum of inner_product_sq over the grid samples; ties resolve to the
/// lowest (y, z) in lexicographic order so runs are reproducible.
worst_sample worst_case_inner_product_sq(const array_config& arr, const scenario& sc,
                                         const uncertainty_grid& grid);

/// Cyclic per-element line search over positions, minimizing the
/// worst-sample inner product with step dx. Windows narrower than the
/// step leave the element where it is.
sweep_result bcd_line_search_positions(const array_config& arr, const scenario& sc,
                                       const uncertainty_grid& grid,
                                       const solver_options& opts);

/// Same search over frequencies on [fc, fc + dF] with step df.
sweep_result bcd_line_search_frequencies(const array_config& arr, const scenario& sc,
                                         const uncertainty_grid& grid,
                                         const solver_options& opts);

/// Closed-form auxiliary update u = 1 / (tr(B W) + 1).
double lemma2_u_opt(const herm_mat& b_yz, const herm_mat& w_cov);

struct robust_trace_row {
    int iteration = 0;
    double capacity_bits = 0.0;  // worst-sample capacity of the relaxation
    double trace_w = 0.0;
    double rank_ratio = 0.0;     // second / first eigenvalue
};

struct robust_solution {
    herm_mat w_cov;
    beamformer w;
    std::vector<robust_trace_row> trace;
    bool rank1 = false;
    int iterations = 0;
    double capacity_bits = 0.0;  // worst-sample capacity achieved by w
};

/// Alternates the closed-form auxiliary updates with a conditional-
/// gradient solve of the relaxed covariance problem over the trace-bounded
/// PSD set, then extracts a beamformer by eigendecomposition when the
/// covariance is numerically rank one and by Gaussian randomization
/// otherwise. Deterministic for a fixed seed.
robust_solution robust_abv_solve(const herm_mat& a, const std::vector<herm_mat>& b_samples,
                                 double pmax_mw, const solver_options& opts,
                                 std::uint64_t seed);

/// Draws n candidates from CN(0, W), scales each to full power and keeps
/// the one with the best objective value.
beamformer gaussian_randomization(const herm_mat& w_cov,
                                  const std::function<double(const complex_vec&)>& objective,
                                  int n, std::uint64_t seed, double pmax_mw);

} // namespace mfda

#endif
