#include <iostream>

#include "hkd/cli.hpp"

int main(int argc, char** argv) {
  return hkd::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
