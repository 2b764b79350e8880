#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace latent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// Runs one lctool command. `args` excludes the program name. Results go to
// `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace latent::cli
