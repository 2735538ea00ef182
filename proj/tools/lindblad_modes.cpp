#include <iostream>

#include "lindblad_modes/cli.hpp"

int main(int argc, char** argv) { return lindblad::run_cli(argc, argv, std::cout, std::cerr); }
