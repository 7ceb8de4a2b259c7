#include <iostream>

#include "gencahn/scenarios.hpp"

int main(int argc, char** argv) {
  return gencahn::cli_main(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
