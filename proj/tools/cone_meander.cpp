#include <iostream>

#include "conemeander/cli.hpp"

int main(int argc, char** argv) { return cmeander::run(argc, argv, std::cout, std::cerr); }
