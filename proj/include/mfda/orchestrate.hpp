// SPDX-License-Identifier: Apache-2.0
//
// Two-stage alternating optimization over the geometry blocks and the
// beamformer, the PA/FDA/MFDA benchmark schemes, and the time-averaged
// capacity under a finite beamformer refresh rate.

#ifndef MFDA_ORCHESTRATE_HPP
#define MFDA_ORCHESTRATE_HPP

#include "mfda/robust.hpp"

#include <optional>
#include <string>

namespace mfda {

enum class scheme_kind { pa, fda, mfda };
enum class csi_mode { perfect, imperfect };

struct scheme_spec {
    scheme_kind kind = scheme_kind::mfda;
    csi_mode csi = csi_mode::perfect;
};

std::string to_string(scheme_kind kind);
std::string to_string(csi_mode csi);

/// Beamformer and channel refresh lattice on [0, T). Both rates must
/// divide the window into an integral number of intervals.
struct timing_grid {
    double t_total_s = 1e-3;
    double dt_brf_s = 1e-6;
    double dt_crf_s = 1e-6;

    long refresh_count() const;  // K
    long channel_count() const;  // L
    void validate() const;
};

/// How refresh windows pair beamformers with channel instants: "causal"
/// holds each beamformer until its next refresh; "double_sum" averages
/// every beamformer against every channel instant.
enum class refresh_pairing { causal, double_sum };

struct block_trace {
    std::string block;  // "positions" or "frequencies"
    int outer = 0;
    std::vector<sweep_trace_row> rows;
};

struct solution {
    array_config array;
    beamformer w;
    double capacity_bits = 0.0;
    std::vector<sweep_trace_row> stage1_trace;   // one row per outer iteration
    std::vector<block_trace> block_traces;       // per-sweep detail
    std::vector<robust_trace_row> stage2_trace;  // relaxed solver, imperfect only
    int iterations_stage1 = 0;                   // sweeps summed over blocks
    int iterations_stage2 = 0;
    bool rank1 = true;
};

/// Runs stage 1 (geometry sweeps; skipped for PA, frequency-only for FDA)
/// followed by stage 2 (closed-form beamformer for perfect CSI, the
/// relaxed solver for imperfect). The capacity trace over outer
/// iterations is non-decreasing. `grid` is required exactly when the
/// scheme uses imperfect CSI.
solution two_stage_ao(const scenario& sc, const array_config& base,
                      const scheme_spec& scheme, const solver_options& opts,
                      std::optional<uncertainty_grid> grid = std::nullopt,
                      std::uint64_t seed = 0);

/// Eq.-style time average: each channel instant is served by the
/// beamformer from the most recent refresh point (or by every refresh
/// point under double_sum), with ideal per-refresh optimization of the
/// weights for the solution's geometry.
double time_avg_secrecy_capacity(const solution& sol, const scenario& sc,
                                 const timing_grid& timing,
                                 refresh_pairing pairing = refresh_pairing::causal);

struct scheme_report {
    scheme_spec scheme;
    double capacity_bits = 0.0;        // time-averaged when timing is given
    double ideal_capacity_bits = 0.0;  // perfectly tracking beamformer
    double upper_bound = 0.0;
    int iterations_stage1 = 0;
    int iterations_stage2 = 0;
    double wall_ms = 0.0;
    std::uint64_t seed = 0;
    std::string status = "ok";
    solution sol;
};

/// One comparable record per scheme: solve, optional time averaging,
/// upper bound, iteration counts. Solver errors are captured in `status`
/// instead of propagating.
scheme_report run_scheme(const scheme_spec& scheme, const scenario& sc,
                         const array_config& base, const solver_options& opts,
                         std::optional<timing_grid> timing = std::nullopt,
                         std::optional<uncertainty_grid> grid = std::nullopt,
                         std::uint64_t seed = 0,
                         refresh_pairing pairing = refresh_pairing::causal);

/// Derives a per-point seed from the root seed; splitmix64 over the
/// point and scheme indices so parallel sweeps stay reproducible.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t point, std::uint64_t scheme);

} // namespace mfda

#endif
