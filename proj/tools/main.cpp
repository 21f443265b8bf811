#include <iostream>

#include "leadlag/cli.hpp"

int main(int argc, char** argv) { return leadlag::run_cli(argc, argv, std::cout, std::cerr); }
