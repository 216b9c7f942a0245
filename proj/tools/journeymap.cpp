#include <iostream>
#include <string>
#include <vector>

#include "journeymap/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return journey::cli::run(args, std::cout, std::cerr);
}
