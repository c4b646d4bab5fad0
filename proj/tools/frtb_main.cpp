#include "frtb/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return frtb::cli::run(argc, argv, std::cout, std::cerr);
}
