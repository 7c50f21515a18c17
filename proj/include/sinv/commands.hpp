#ifndef SINV_COMMANDS_HPP
#define SINV_COMMANDS_HPP

namespace sinv {

/// Full CLI entry point (argument parsing, dispatch, error-to-exit-code
/// mapping). Exit codes: 0 ok, 1 usage/config, 2 data, 3 provenance.
int run_command(int argc, const char* const* argv);

}  // namespace sinv

#endif  // SINV_COMMANDS_HPP
