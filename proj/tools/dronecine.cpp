#include <iostream>

#include "dronecine/cli.hpp"

int main(int argc, char** argv) {
  return dronecine::cli::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
