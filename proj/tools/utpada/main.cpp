#include <iostream>

#include "utpada/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return utpada::cli::run(args, std::cout, std::cerr);
}
