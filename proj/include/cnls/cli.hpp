#pragma once
#include "cnls/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cnls {

enum ExitCode { exit_pass = 0, exit_check_failure = 1, exit_config_error = 2, exit_solver_failure = 3 };

// Runs cfg.mode, writing artifacts under cfg.out.  Messages go to `log`;
// every error class is mapped to its exit code (nothing escapes).
int run_mode(const RunConfig& cfg, std::ostream& log);

// The whole command line: `cnls <mode> --config <path> [--out] [--jobs] [--seed]`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cnls
