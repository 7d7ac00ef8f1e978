#include <iostream>

#include "maskit/cli.hpp"

int main(int argc, char** argv) { return maskit::run(argc, argv, std::cout, std::cerr); }
