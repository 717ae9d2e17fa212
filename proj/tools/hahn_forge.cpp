#include <iostream>

#include "hahn/cli.hpp"

int main(int argc, char** argv) { return hahn::run_cli(argc, argv, std::cout, std::cerr); }
