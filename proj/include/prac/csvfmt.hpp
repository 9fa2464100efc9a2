// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_CSVFMT_HPP
#define PRAC_CSVFMT_HPP

#include <cstdio>
#include <string>
#include <vector>

namespace prac {

// Fixed-precision float formatting so CSV output is byte-stable.
inline std::string fmt_double(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline std::string join_csv(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ",";
    line += cells[i];
  }
  return line;
}

}  // namespace prac

#endif  // PRAC_CSVFMT_HPP
