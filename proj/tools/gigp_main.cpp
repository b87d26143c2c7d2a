#include <iostream>

#include "gigp/cli.hpp"

int main(int argc, char** argv) { return gigp::cli::run(argc, argv, std::cout, std::cerr); }
