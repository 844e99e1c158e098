#include <iostream>
#include <string>
#include <vector>

#include "ccasgnn/cli/app.hpp"

int main(int argc, char** argv) {
  return ccasgnn::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
