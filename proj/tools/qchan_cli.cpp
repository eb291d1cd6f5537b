#include <iostream>

#include "qchan/cli.hpp"

int main(int argc, char** argv) { return qchan::run_cli(argc, argv, std::cout, std::cerr); }
