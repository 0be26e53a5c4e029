#include <iostream>

#include "cotscope/cli.hpp"

int main(int argc, char** argv) { return cotscope::run_cli(argc, argv, std::cout, std::cerr); }
