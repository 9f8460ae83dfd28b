#include <iostream>

#include "dtsolve/textio.hpp"

int main(int argc, char** argv) {
  return dtsolve::run_cli(argc, argv, std::cout, std::cerr);
}
