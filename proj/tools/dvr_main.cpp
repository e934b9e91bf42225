#include <iostream>

#include "dvr/cli.hpp"

int main(int argc, char** argv) { return dvr::cli::run_command(argc, argv, std::cout, std::cerr); }
