#include <iostream>

#include "qlink/cli/commands.hpp"

int main(int argc, char** argv) { return qlink::cli::run_cli(argc, argv, std::cout, std::cerr); }
