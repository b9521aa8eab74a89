#include <iostream>

#include "mfgplan_cli/cli.hpp"

int main(int argc, char** argv) { return mfgplan::cli::run_cli(argc, argv, std::cout, std::cerr); }
