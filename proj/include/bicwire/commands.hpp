#pragma once

#include <iosfwd>
#include <string_view>

#include "bicwire/config.hpp"

namespace bicwire::cli {

enum ExitCode : int { ok = 0, config_error = 2, solver_error = 3, verification_failed = 4 };

// Each command writes its table/report to `out` and diagnostics to `err`, and
// returns an exit code. Output depends only on the config, never on timing or
// worker count.
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bic(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_selfenergy(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Dispatch by subcommand name; maps exceptions to exit codes 2 and 3.
int run_command(std::string_view name, const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace bicwire::cli
