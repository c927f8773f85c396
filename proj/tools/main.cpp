#include <iostream>

#include "activelab/cli.hpp"

int main(int argc, char** argv) {
  return activelab::cli::parse_and_dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
