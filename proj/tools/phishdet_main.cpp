#include <iostream>

#include "phishdet/cli/app.hpp"

int main(int argc, char** argv) { return phishdet::cli::run(argc, argv, std::cout, std::cerr); }
