#include <iostream>

#include "banditlab/cli.hpp"

int main(int argc, char** argv) {
  return banditlab::cli::run(argc, argv, std::cout, std::cerr);
}
