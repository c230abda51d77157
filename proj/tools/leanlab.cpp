#include "leanlab/cli.hpp"

#include <unistd.h>

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return leanlab::cli::run_subcommand(args, {std::cin, std::cout, std::cerr, isatty(STDIN_FILENO) == 1});
}
