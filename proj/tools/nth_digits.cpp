#include <iostream>

#include "nthdigit/cli.hpp"

int main(int argc, char** argv) {
  return nthdigit::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
