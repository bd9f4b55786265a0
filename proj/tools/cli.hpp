#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evince::cli {

// Stable exit-code contract.
inline constexpr int kExitOk = 0;            // success / converged
inline constexpr int kExitUsage = 2;         // bad flags or bad config
inline constexpr int kExitHumanReview = 3;   // non-convergence / flagged
inline constexpr int kExitIngest = 4;        // dataset/script ingestion failure
inline constexpr int kExitRemoteAgent = 5;   // remote agent failure

/// Dispatches one invocation (argv without the program name). Data goes to
/// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evince::cli
