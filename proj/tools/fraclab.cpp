#include <iostream>
#include <string>
#include <vector>

#include "fraclab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fraclab::cli::dispatch(args, std::cout, std::cerr);
}
