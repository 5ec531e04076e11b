#include <iostream>

#include "stmc/cli.hpp"

int main(int argc, char** argv) { return stmc::cli::run(argc, argv, std::cout, std::cerr); }
