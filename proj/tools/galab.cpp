#include <iostream>

#include "galab/cli/app.hpp"

int main(int argc, char** argv) { return galab::cli::run_cli(argc, argv, std::cout, std::cerr); }
