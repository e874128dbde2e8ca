#include <iostream>
#include <string>
#include <vector>

#include "relu3d/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return relu3d::cli::run(args, std::cout, std::cerr);
}
