#include "pbmkit/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pbm::cli::run(argc, argv, std::cout, std::cerr); }
