#include <collab/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return collab::cli::run(argc, argv, std::cout, std::cerr); }
