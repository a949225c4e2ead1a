#include <iostream>

#include "batchq/cli.hpp"

int main(int argc, char** argv) { return batchq::cli::run(argc, argv, std::cout, std::cerr); }
