#include <iostream>

#include "codedelay/cli/commands.hpp"

int main(int argc, char** argv) { return codedelay::cli::run(argc, argv, std::cout, std::cerr); }
