#include <string>
#include <vector>

#include "saddlepoint/io.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return saddlepoint::cli::run(args);
}
