#pragma once

#include <string>

#include "herdlab/scenario.hpp"

namespace herdlab {

inline constexpr const char* kVersion = "0.1.0";

/// Dispatches one CLI command (simulate | equilibria | stability | roa |
/// sweep | pi-roa) over a loaded scenario, writing CSV/JSON artifacts under
/// out_dir. Returns the process exit code: 0 on success, 2 on model errors
/// (a partial report is still written). Usage-level errors (unknown command,
/// bad config) are thrown as ValidationError/ParseError for the caller.
int run_command(const std::string& command, const ScenarioConfig& config,
                const std::string& out_dir, int threads);

}  // namespace herdlab
