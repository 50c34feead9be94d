#include "desing/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return desing::run_main(argc, argv, std::cout, std::cerr); }
