#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return rabicf::run(argc, argv, std::cout, std::cerr); }
