#include <iostream>
#include <string>
#include <vector>

#include "asymcop/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return asymcop::cli::run_cli(std::move(args), std::cout, std::cerr);
}
