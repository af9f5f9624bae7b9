#include <iostream>

#include "semiform/cli.hpp"

int main(int argc, char** argv) {
  return semiform::run_command({argv + 1, argv + argc}, std::cout, std::cerr);
}
