#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ptbox::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

// args excludes the program name, e.g. {"spectrum", "--L", "1"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args);

int main_entry(int argc, char** argv);

}  // namespace ptbox::cli
