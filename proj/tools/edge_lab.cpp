#include <iostream>

#include "edgelab/cli.hpp"

int main(int argc, char** argv) {
  return edgelab::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
