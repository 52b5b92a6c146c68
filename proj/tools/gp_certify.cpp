#include <iostream>

#include "gpcert/cli.hpp"

int main(int argc, char** argv) { return gpcert::cli::run(argc, argv, std::cout, std::cerr); }
