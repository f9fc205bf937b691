#include "commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return f0priv::cli::run(argc, argv, std::cout, std::cerr);
}
