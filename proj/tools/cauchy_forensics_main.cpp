#include <iostream>

#include "cauchy_forensics/cli.hpp"

int main(int argc, char** argv) {
  return cauchy_forensics::cli::run(argc, argv, std::cout, std::cerr);
}
