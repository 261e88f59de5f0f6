#include <iostream>

#include "msd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return msd::run_cli(args, std::cout, std::cerr);
}
