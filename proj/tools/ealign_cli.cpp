#include <iostream>

#include "ealign/cli.hpp"

int main(int argc, char** argv) { return ealign::cli::dispatch(argc, argv, std::cout, std::cerr); }
