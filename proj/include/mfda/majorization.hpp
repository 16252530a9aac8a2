// SPDX-License-Identifier: Apache-2.0
//
// Quadratic majorize-minimize machinery for the pairwise cosine objective
// and the block-coordinate sweeps that move antenna positions and
// frequencies one element at a time.

#ifndef MFDA_MAJORIZATION_HPP
#define MFDA_MAJORIZATION_HPP

#include "mfda/channel.hpp"

#include <cstdint>
#include <vector>

namespace mfda {

/// Quadratic surrogate u(v) = k (v - zeta)^2 + delta, tangent to the
/// cosine term it majorizes at the expansion point.
struct majorizer {
    double k = 0.0;      // curvature
    double zeta = 0.0;   // vertex location
    double delta = 0.0;  // vertex value
};

/// Knobs shared by the sweep solvers. Zero step sizes are resolved by the
/// callers to lambda/20 (positions) and dF/200 (frequencies).
struct solver_options {
    double epsilon_bits = 1e-4;    // convergence threshold on capacity change
    int max_sweeps = 200;          // full passes over the array per solve
    double dx_m = 0.0;             // line search increment, positions
    double df_hz = 0.0;            // line search increment, frequencies
    int max_outer = 30;            // alternations of the two blocks
    int randomization_count = 200; // Gaussian randomization candidates
    double rank1_ratio = 1e-6;     // eigenvalue ratio treated as rank one
    double fw_gap_tol = 1e-8;      // Frank-Wolfe duality gap target
    int fw_max_iters = 400;        // Frank-Wolfe iterations per stage
    int max_outer_w = 60;          // AO iterations of the relaxed solver
    int random_starts = 0;         // extra random initializations, 0 = ramp only
    void validate() const;
};

/// Majorizer of y(v) = cos(2 pi (rate v - offset)) at v0, for any nonzero
/// rate (positive for position updates, either sign for frequency
/// updates). The derivative-zero cases are entered through a guard band
/// |y'| < 1e-9 with the sign of y choosing the branch.
majorizer majorize_cosine_at(double v0, double rate, double offset);

/// Lemma-style majorizer of cos(2 pi (tau f_m - tau_n f_n)) as a function
/// of tau, expanded at tau_m. Requires f_m > 0.
majorizer cosine_majorizer(double tau_m, double tau_n, double f_m, double f_n);

/// Minimizer of the summed surrogate: weighted mean of the vertices.
/// Throws numerical_error when the total curvature is not positive; the
/// sweep falls back to endpoint evaluation in that case.
double bsum_tau_update(const std::vector<majorizer>& majorizers);

/// Maps the unconstrained delay optimum back to a position and applies the
/// four-branch clamp with D1 = Dmax - (M - m) D0; element 0 stays at the
/// origin. Throws validation_error when sin(theta_e) == sin(theta_b), in
/// which case positions cannot influence the delays at all.
double clamp_position(double tau_opt, int index, double x_prev,
                      const array_config& arr, const scenario& sc);

struct sweep_trace_row {
    int iteration = 0;        // full sweeps completed
    double objective = 0.0;   // pairwise cosine sum (inner product minus M)
    double capacity_bits = 0.0;
};

struct sweep_result {
    array_config array;
    std::vector<sweep_trace_row> trace;
    int sweeps = 0;
    bool converged = false;
    bool no_effect = false;  // geometry makes this block inert
};

/// Cyclic BSUM over element positions. The objective is non-increasing
/// across accepted steps and the array invariants hold after every one.
sweep_result bsum_sweep_positions(const array_config& arr, const scenario& sc,
                                  const solver_options& opts);

/// Same sweep structure over element frequencies with the roles of f and
/// tau exchanged; the unconstrained optimum is clamped to [fc, fc + dF].
sweep_result bsum_sweep_frequencies(const array_config& arr, const scenario& sc,
                                    const solver_options& opts);

/// Random feasible array used by convergence experiments: positions drawn
/// uniformly within the spacing constraints, frequencies on the ramp.
array_config random_feasible_array(const array_config& like, const scenario& sc,
                                   std::uint64_t seed);

} // namespace mfda

#endif
