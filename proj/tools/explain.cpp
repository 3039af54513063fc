#include <iostream>

#include "explain_cli.hpp"

int main(int argc, char** argv) { return explain_cli::run(argc, argv, std::cout, std::cerr); }
