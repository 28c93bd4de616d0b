#include <string>
#include <vector>

#include "satopt/cli.hpp"

int main(int argc, char** argv) {
  return satopt::cli::run(std::vector<std::string>(argv, argv + argc));
}
