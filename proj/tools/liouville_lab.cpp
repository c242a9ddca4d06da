#include <iostream>

#include "liouville/runner.hpp"

int main(int argc, char** argv) { return liouville::run_cli(argc, argv, std::cout, std::cerr); }
