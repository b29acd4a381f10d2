#include <iostream>

#include "qmpemba/cli.hpp"

int main(int argc, char** argv) { return qmpemba::run_cli(argc, argv, std::cout, std::cerr); }
