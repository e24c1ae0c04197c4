#include <iostream>
#include <string>
#include <vector>

#include "biq/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return biq::RunCli(args, std::cout, std::cerr);
}
