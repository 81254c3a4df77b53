#include "beamide/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return beamide::cli::run(argc, argv, std::cout, std::cerr); }
