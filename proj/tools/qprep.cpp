#include <iostream>

#include "qprep/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qprep::cli::run_cli(args, std::cout, std::cerr);
}
