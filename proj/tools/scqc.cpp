#include <iostream>

#include "scqc/cli/cli.hpp"

int main(int argc, char** argv) { return scqc::cli::run(argc, argv, std::cout, std::cerr); }
