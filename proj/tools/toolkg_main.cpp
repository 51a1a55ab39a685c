#include <iostream>

#include "toolkg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return toolkg::cli::run(args, std::cout, std::cerr);
}
