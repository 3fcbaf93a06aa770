#include <iostream>

#include "rkhs/cli.hpp"

int main(int argc, char** argv) {
  return rkhs::cli::run(argc, argv, std::cout, std::cerr);
}
