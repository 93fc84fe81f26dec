#include <iostream>

#include "affsphere/cli.hpp"

int main(int argc, char** argv) { return affsphere::cli::run(argc, argv, std::cout, std::cerr); }
