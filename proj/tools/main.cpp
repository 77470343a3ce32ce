#include <iostream>
#include <string>
#include <vector>

#include "risuav/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return risuav::run_cli(args, std::cout, std::cerr);
}
