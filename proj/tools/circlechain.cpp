#include <iostream>

#include "circlechain/cli.hpp"

int main(int argc, char** argv) { return circlechain::cli_main(argc, argv, std::cin, std::cout, std::cerr); }
