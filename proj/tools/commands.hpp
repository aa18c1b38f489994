#pragma once

#include <iosfwd>

#include "config.hpp"

namespace autoexplore::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitBudget = 2;

/// Run the configured command (all replicates) and write its CSV + JSON outputs.
/// Returns 0 on success, 2 when a sample budget ran out, 1 on input errors.
int run_command(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Seed of replicate r: the base seed itself for a single replicate.
std::uint64_t replicate_seed(std::uint64_t seed, int replicate, int replicates);

}  // namespace autoexplore::cli
