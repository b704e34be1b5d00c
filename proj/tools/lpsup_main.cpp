#include <iostream>

#include "lpsup/cli.hpp"

int main(int argc, char** argv) { return lpsup::cli::run(argc, argv, std::cout, std::cerr); }
