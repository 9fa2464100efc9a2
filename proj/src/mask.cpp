// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#include "prac/mask.hpp"

#include <utility>

#include "prac/binio.hpp"
#include "prac/error.hpp"

namespace prac {

namespace {
constexpr std::uint32_t kMaskVersion = 1;
}

std::size_t SparseMask::total() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.bits.size();
  return n;
}

std::size_t SparseMask::ones() const {
  std::size_t n = 0;
  for (const auto& e : entries)
    for (std::uint8_t b : e.bits) n += b;
  return n;
}

const SparseMask::Entry* SparseMask::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

bool SparseMask::same_alignment(const SparseMask& other) const {
  if (entries.size() != other.entries.size()) return false;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].name != other.entries[i].name ||
        entries[i].bits.size() != other.entries[i].bits.size())
      return false;
  return true;
}

double sparsity(const SparseMask& mask) {
  const std::size_t total = mask.total();
  require(total > 0, "sparsity of an empty mask is undefined");
  return 1.0 - static_cast<double>(mask.ones()) / static_cast<double>(total);
}

HammingDistance hamming(const SparseMask& a, const SparseMask& b) {
  require(a.same_alignment(b), "hamming distance needs identically aligned masks");
  HammingDistance d;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const auto& ba = a.entries[i].bits;
    const auto& bb = b.entries[i].bits;
    for (std::size_t k = 0; k < ba.size(); ++k) d.count += ba[k] != bb[k];
  }
  const std::size_t total = a.total();
  d.normalized = total ? static_cast<double>(d.count) / static_cast<double>(total) : 0.0;
  return d;
}

double relative_similarity(const SparseMask& a, const SparseMask& b) {
  require(a.same_alignment(b), "relative similarity needs identically aligned masks");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const auto& ba = a.entries[i].bits;
    const auto& bb = b.entries[i].bits;
    for (std::size_t k = 0; k < ba.size(); ++k) {
      inter += ba[k] & bb[k];
      uni += ba[k] | bb[k];
    }
  }
  require(uni > 0, "relative similarity of two all-zero masks is undefined");
  return static_cast<double>(inter) / static_cast<double>(uni);
}

bool is_subset(const SparseMask& child, const SparseMask& parent) {
  if (!child.same_alignment(parent)) return false;
  for (std::size_t i = 0; i < child.entries.size(); ++i) {
    const auto& bc = child.entries[i].bits;
    const auto& bp = parent.entries[i].bits;
    for (std::size_t k = 0; k < bc.size(); ++k)
      if (bc[k] && !bp[k]) return false;
  }
  return true;
}

SparseMask ones_mask(const std::vector<std::pair<std::string, std::size_t>>& layout) {
  SparseMask mask;
  mask.entries.reserve(layout.size());
  for (const auto& [name, size] : layout)
    mask.entries.push_back({name, std::vector<std::uint8_t>(size, 1)});
  return mask;
}

void save_mask(const std::string& path, const SparseMask& mask) {
  auto os = open_out(path);
  write_bytes(os, "MASK", 4);
  write_le<std::uint32_t>(os, kMaskVersion);
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(mask.entries.size()));
  for (const auto& e : mask.entries) {
    write_string(os, e.name);
    write_le<std::uint64_t>(os, static_cast<std::uint64_t>(e.bits.size()));
    std::vector<std::uint8_t> packed((e.bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < e.bits.size(); ++i)
      if (e.bits[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    if (!packed.empty()) write_bytes(os, packed.data(), packed.size());
  }
}

SparseMask load_mask(const std::string& path) {
  auto is = open_in(path);
  char magic[4];
  read_bytes(is, magic, 4, "mask magic");
  if (std::string(magic, 4) != "MASK") throw DataError("bad mask magic in " + path);
  const auto version = read_le<std::uint32_t>(is, "mask version");
  if (version != kMaskVersion)
    throw DataError("unsupported mask version " + std::to_string(version));
  const auto count = read_le<std::uint32_t>(is, "mask entry count");
  SparseMask mask;
  mask.entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    SparseMask::Entry e;
    e.name = read_string(is, "mask entry name");
    const auto nbits = read_le<std::uint64_t>(is, "mask bit length");
    std::vector<std::uint8_t> packed((nbits + 7) / 8);
    if (!packed.empty()) read_bytes(is, packed.data(), packed.size(), "mask bits");
    e.bits.resize(nbits);
    for (std::uint64_t k = 0; k < nbits; ++k)
      e.bits[k] = (packed[k / 8] >> (k % 8)) & 1u;
    mask.entries.push_back(std::move(e));
  }
  return mask;
}

}  // namespace prac
