#include <iostream>

#include "sigmalab/cli.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    return sigmalab::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
