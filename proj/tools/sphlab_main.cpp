#include <iostream>
#include <string>
#include <vector>

#include "sphlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return sphlab::cli::run_cli(args, std::cout, std::cerr);
}
