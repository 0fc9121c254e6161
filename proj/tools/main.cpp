#include <string>
#include <vector>

#include "sgrecon/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sgrecon::cli::run(args);
}
