#include <iostream>

#include "mifc/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mifc::cli::run(args, std::cout, std::cerr);
}
