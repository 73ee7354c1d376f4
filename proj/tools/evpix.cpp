#include <iostream>

#include "evpix/cli.hpp"

int main(int argc, char** argv) { return evpix::cli_main(argc, argv, std::cout, std::cerr); }
