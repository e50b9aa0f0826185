#include <iostream>
#include <string>
#include <vector>

#include <vortex2c/cli.hpp>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return vortex2c::cli::run(args, std::cout, std::cerr);
}
