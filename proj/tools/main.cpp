#include "luxp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return luxp::run_cli(argc, argv, std::cout, std::cerr); }
