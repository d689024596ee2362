#include <iostream>

#include "paraboloid/cli.hpp"

int main(int argc, char** argv) { return paraboloid::cli::run_cli(argc, argv, std::cout, std::cerr); }
