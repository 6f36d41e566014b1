#include "scode/cli.hpp"

int main(int argc, char** argv) {
  return scode::cli::run(argc, argv, std::cout, std::cerr);
}
