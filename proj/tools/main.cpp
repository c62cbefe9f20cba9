#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  return neuropath::cli::run(argc, argv, std::cout, std::cerr);
}
