#include <iostream>

#include "hegel/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hegel::run_main(args, std::cout, std::cerr);
}
