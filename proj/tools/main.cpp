#include <string>
#include <vector>

#include "landrl/cli.hpp"

int main(int argc, char** argv) {
  return landrl::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
