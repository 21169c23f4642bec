#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mifc::cli {

/// Exit codes: 0 success, 1 data errors (format, validation, parse), 2
/// transport, 3 config and usage errors.
inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitTransport = 2;
inline constexpr int kExitConfig = 3;

/// Runs one `mifc` invocation. `args` excludes the program name. Logs go to
/// `err`, command output to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mifc::cli
