#include "corrscreen/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return corrscreen::cli::run(argc, argv, std::cout, std::cerr); }
