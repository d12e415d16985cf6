#include <iostream>
#include <string>
#include <vector>

#include "celdyn/cli.hpp"

int main(int argc, char** argv) {
  return celdyn::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
