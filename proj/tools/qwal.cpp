#include <iostream>

#include "qwal/cli.hpp"

int main(int argc, char** argv) { return qwal::run_cli(argc, argv, std::cout, std::cerr); }
