#include <iostream>
#include <string>
#include <vector>

#include "gridlocus/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gridlocus::run_cli(args, std::cout, std::cerr);
}
