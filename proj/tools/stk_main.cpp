#include <iostream>

#include "subtree_kernel/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return stk::run_cli(args, std::cout, std::cerr);
}
