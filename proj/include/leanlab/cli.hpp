#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace leanlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

struct Streams {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    bool interactive = false; // annotate refuses to run otherwise
};

/// Runs one command line. args[0] is the program name. Returns 0 on
/// success, 1 on a usage error and 2 when a stage fails on its data.
int run_subcommand(const std::vector<std::string>& args, Streams io);

} // namespace leanlab::cli
