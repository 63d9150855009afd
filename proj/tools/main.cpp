#include <string>
#include <vector>

#include "augsize/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return augsize::cli::run_command(args);
}
