#include <iostream>

#include "fallowopt/cli.hpp"

int main(int argc, char** argv) { return fallowopt::cli::run(argc, argv, std::cout, std::cerr); }
