#include <iostream>

#include "tdledger/cli.hpp"

int main(int argc, char** argv) { return tdledger::run_cli(argc, argv, std::cout, std::cerr); }
