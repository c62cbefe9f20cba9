#pragma once

#include <iosfwd>

#include <json.hpp>

#include "run_config.hpp"

namespace neuropath::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataOrModel = 2, kNumeric = 3 };

// Stages. Each reads the artifacts of the previous ones from cfg.out (and the
// model directory), so any stage can be rerun on its own.
void train_stage(const RunConfig& cfg, std::ostream& log);
void localize_stage(const RunConfig& cfg, std::ostream& log);
void synthesize_stage(const RunConfig& cfg, std::ostream& log);
nlohmann::json evaluate_stage(const RunConfig& cfg, std::ostream& log);

// Parses `neuropath <subcommand> [flags]`, runs it and maps failures onto
// ExitCode. Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace neuropath::cli
