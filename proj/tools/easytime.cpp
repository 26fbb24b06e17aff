#include <iostream>

#include "easytime/cli.hpp"

int main(int argc, char** argv) { return easytime::cli::run_cli(argc, argv, std::cout, std::cerr); }
