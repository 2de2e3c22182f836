#include "randgener/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return randgener::cli::run(std::move(args));
}
