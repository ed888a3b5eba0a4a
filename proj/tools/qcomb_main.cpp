#include <iostream>

#include "qcomb/cli.hpp"

int main(int argc, char** argv) { return qcomb::run_cli(argc, argv, std::cout, std::cerr); }
