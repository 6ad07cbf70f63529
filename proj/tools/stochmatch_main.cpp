#include <iostream>

#include "stochmatch/cli.hpp"

int main(int argc, char** argv) {
  return stochmatch::cli::run(argc, argv, std::cout, std::cerr);
}
