#ifndef HETERO_CLI_HPP
#define HETERO_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace hetero {

/// Run the command-line interface on already-split arguments (no program
/// name). Returns 0 on success, 1 on validation errors, 2 on runtime
/// errors; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hetero

#endif // HETERO_CLI_HPP
