#include <iostream>

#include "qgs/cli.hpp"

int main(int argc, char** argv) {
  const auto parsed = qgs::cli::parse_args(argc, argv, std::cout, std::cerr);
  if (!parsed.config) return parsed.exit_code;
  return qgs::cli::run(*parsed.config, std::cout, std::cerr);
}
