#include <iostream>
#include <string>
#include <vector>

#include "mstcam/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mstcam::run_cli(args, std::cout, std::cerr);
}
