#include <toeplitz/cli.hpp>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return toeplitz::run(std::move(args));
}
