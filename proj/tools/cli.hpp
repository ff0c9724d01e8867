#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fidelity::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitProcessing = 1;
inline constexpr int kExitValidation = 2;

/// Runs one subcommand. `args` excludes the program name. Returns 0 on
/// success, 2 on usage or validation errors and 1 on processing errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(const std::vector<std::string>& args);

}  // namespace fidelity::cli
