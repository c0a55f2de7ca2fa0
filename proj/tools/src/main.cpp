#include <iostream>

#include "mcv_cli/commands.hpp"

int main(int argc, char** argv) { return mcv::cli::run(argc, argv, std::cout, std::cerr); }
