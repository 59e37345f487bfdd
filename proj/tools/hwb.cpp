#include <iostream>

#include "hwb/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hwb::cli::run(args, std::cout, std::cerr);
}
