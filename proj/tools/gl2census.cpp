#include <iostream>

#include "gl2census/cli.hpp"

int main(int argc, char** argv) { return gl2census::run_cli(argc, argv, std::cout, std::cerr); }
