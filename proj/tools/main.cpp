#include <iostream>

#include "fsda_cli/commands.hpp"

int main(int argc, char** argv) { return fsda::cli::run_cli(argc, argv, std::cout, std::cerr); }
