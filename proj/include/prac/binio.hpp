// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_BINIO_HPP
#define PRAC_BINIO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "prac/error.hpp"

namespace prac {

static_assert(std::endian::native == std::endian::little,
              "on-disk formats are little-endian; big-endian hosts need swaps");

inline void write_bytes(std::ostream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  if (!os) throw DataError("write failed");
}

inline void read_bytes(std::istream& is, void* p, std::size_t n, const std::string& what) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw DataError("truncated file while reading " + what);
}

template <class T>
void write_le(std::ostream& os, T v) {
  write_bytes(os, &v, sizeof(T));
}

template <class T>
T read_le(std::istream& is, const std::string& what) {
  T v{};
  read_bytes(is, &v, sizeof(T), what);
  return v;
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  write_bytes(os, s.data(), s.size());
}

inline std::string read_string(std::istream& is, const std::string& what) {
  const auto n = read_le<std::uint32_t>(is, what + " length");
  if (n > (1u << 20)) throw DataError(what + " length is implausible");
  std::string s(n, '\0');
  read_bytes(is, s.data(), n, what);
  return s;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path);
  return os;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open for reading: " + path);
  return is;
}

// Big-endian u32 for the IDX image/label format.
inline std::uint32_t read_be32(std::istream& is, const std::string& what) {
  std::uint8_t b[4];
  read_bytes(is, b, 4, what);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

inline void write_be32(std::ostream& os, std::uint32_t v) {
  const std::uint8_t b[4] = {std::uint8_t(v >> 24), std::uint8_t(v >> 16),
                             std::uint8_t(v >> 8), std::uint8_t(v)};
  write_bytes(os, b, 4);
}

}  // namespace prac

#endif  // PRAC_BINIO_HPP
