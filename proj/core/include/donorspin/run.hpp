#pragma once

#include <string>
#include <vector>

#include "donorspin/config.hpp"

namespace donorspin {

struct RunResult {
  std::vector<std::string> artifacts;  // files written, in order
};

/// Executes the configured subcommand and writes its artifacts (plus the
/// resolved-config echo) into cfg.output_dir. Every artifact embeds the
/// config hash. On any failure the files written so far are removed and the
/// exception propagates.
RunResult run(const RunConfig& cfg);

}  // namespace donorspin
