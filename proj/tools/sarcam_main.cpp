#include <iostream>

#include "sarcam/cli.hpp"

int main(int argc, char** argv) { return sarcam::cli::run(argc, argv, std::cout, std::cerr); }
