#include <iostream>

#include "novascore/cli.hpp"

int main(int argc, char** argv) { return novascore::cli::run(argc, argv, std::cout, std::cerr); }
