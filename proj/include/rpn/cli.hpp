#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rpn {

namespace exit_code {
inline constexpr int holds = 0;
inline constexpr int counterexample = 1;
inline constexpr int usage = 2;
inline constexpr int limit_exceeded = 3;
}  // namespace exit_code

/// Entry point of the `rpnmc` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rpn
