#include <iostream>

#include "krein_cli/cli.hpp"

int main(int argc, char** argv) { return krein::cli::run(argc, argv, std::cout, std::cerr); }
