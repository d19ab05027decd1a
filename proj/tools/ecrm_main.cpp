#include <iostream>

#include "ecrm/cli.hpp"

int main(int argc, char** argv) { return ecrm::run(argc, argv, std::cout, std::cerr); }
