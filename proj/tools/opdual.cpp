#include "opdual/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return opdual::cli_main(argc, argv, std::cout, std::cerr); }
