#include <iostream>

#include "graphblow/cli.hpp"

int main(int argc, char** argv) { return graphblow::run_cli(argc, argv, std::cout, std::cerr); }
