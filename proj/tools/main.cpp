#include <iostream>

#include "oversmooth/cli.hpp"

int main(int argc, char** argv) { return oversmooth::cli::run(argc, argv, std::cout, std::cerr); }
