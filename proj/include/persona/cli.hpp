#ifndef PERSONA_CLI_HPP
#define PERSONA_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace persona::cli {

enum ExitCode : int { ok = 0, input_error = 1, infeasible = 2 };

/**
 * Runs one invocation. `args` excludes the program name. Primary output is
 * written to `out` (or the --output file) only when the command succeeds;
 * diagnostics go to `err` as a single line.
 */
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace persona::cli

#endif
