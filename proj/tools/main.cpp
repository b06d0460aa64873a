#include <iostream>

#include "dichotomy/cli.hpp"

int main(int argc, char** argv) { return dichotomy::cli::main_entry(argc, argv, std::cout, std::cerr); }
