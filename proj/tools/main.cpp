#include "cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return g2lab::cli::run(argc, argv, std::cout, std::cerr); }
