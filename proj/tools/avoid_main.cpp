#include <iostream>

#include "avoid/cli.hpp"

int main(int argc, char** argv) { return avoid::cli::main_entry(argc, argv, std::cout, std::cerr); }
