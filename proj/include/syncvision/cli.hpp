#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace syncvision::cli {

inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace syncvision::cli
