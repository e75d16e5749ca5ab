#include <string>
#include <vector>

#include "asense/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return asense::cli_main(args);
}
