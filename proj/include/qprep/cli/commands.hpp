#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qprep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Full command line without the program name, e.g. {"train", "--config", "x.ini"}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qprep::cli
