#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace corrscreen::cli {

// sysexits-style codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 64;       // bad flags or flag values
inline constexpr int kExitData = 65;        // invalid data, infeasible threshold solve
inline constexpr int kExitIo = 74;          // file I/O failure

inline constexpr std::string_view kVersion = "1.0.0";

// "start:stop:step" ranges (stop inclusive) and comma lists, mixable:
// "10:35:5,50" -> 10 15 20 25 30 35 50.
std::vector<std::size_t> parse_size_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);

// Runs one subcommand. argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace corrscreen::cli
