// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#include <iostream>

#include "prac/cli.hpp"

int main(int argc, char** argv) {
  return prac::cli_main(argc, argv, std::cout, std::cerr);
}
