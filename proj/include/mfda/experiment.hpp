// SPDX-License-Identifier: Apache-2.0
//
// Sweep execution and file emission: one CSV per sweep, an optional
// iteration-trace CSV, and a JSON manifest tying outputs to the resolved
// config and seeds. Output bytes are deterministic for a fixed seed; wall
// times are only recorded when explicitly requested.

#ifndef MFDA_EXPERIMENT_HPP
#define MFDA_EXPERIMENT_HPP

#include "mfda/config.hpp"

#include <optional>

namespace mfda {

struct run_options {
    std::string output_dir = ".";
    int threads = 1;
    bool record_wall_time = false;  // keeps CSVs byte-stable when off
    std::optional<csi_mode> csi_override;
    std::optional<std::uint64_t> seed_override;
};

struct experiment_result {
    std::vector<std::string> files;
    int rows = 0;
    int failed_rows = 0;
};

/// Runs every sweep point for every scheme and writes the CSVs and the
/// manifest. Per-row solver failures are recorded in the status column
/// and do not stop the run.
experiment_result run_experiment(const experiment_config& cfg, const run_options& opts);

/// FNV-1a hash of the canonical config serialization.
std::uint64_t config_hash(const experiment_config& cfg);

} // namespace mfda

#endif
