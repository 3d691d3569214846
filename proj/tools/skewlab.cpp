#include <iostream>

#include "skewlab/cli.hpp"

int main(int argc, char** argv) {
  return skewlab::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
