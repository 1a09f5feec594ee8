#include <iostream>
#include <vector>

#include "ncconv/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ncconv::run_command(args, std::cout, std::cerr);
}
