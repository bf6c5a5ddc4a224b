#include <iostream>

#include "rpn/cli.hpp"

int main(int argc, char** argv) {
  return rpn::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
