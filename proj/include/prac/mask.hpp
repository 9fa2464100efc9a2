// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_MASK_HPP
#define PRAC_MASK_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace prac {

// Binary keep/drop flags over the prunable weights, aligned by entry name to
// a ParameterSet. One byte per weight in memory; packed bits on disk.
struct SparseMask {
  struct Entry {
    std::string name;
    std::vector<std::uint8_t> bits;  // each 0 or 1
  };

  std::vector<Entry> entries;

  std::size_t total() const;
  std::size_t ones() const;

  const Entry* find(const std::string& name) const;

  bool same_alignment(const SparseMask& other) const;
};

struct HammingDistance {
  std::size_t count = 0;
  double normalized = 0.0;
};

// 1 - ones/total, in [0, 1].
double sparsity(const SparseMask& mask);

// Positions where the two masks differ; normalized by the total prunable count.
HammingDistance hamming(const SparseMask& a, const SparseMask& b);

// |a AND b| / |a OR b|; throws InputError when both masks are all-zero.
double relative_similarity(const SparseMask& a, const SparseMask& b);

// True when every kept position of child is also kept in parent.
bool is_subset(const SparseMask& child, const SparseMask& parent);

SparseMask ones_mask(const std::vector<std::pair<std::string, std::size_t>>& layout);

// Mask file: "MASK" magic, version, entry count, then per entry name,
// bit length (u64) and an LSB-first packed little-endian bitset.
void save_mask(const std::string& path, const SparseMask& mask);
SparseMask load_mask(const std::string& path);

}  // namespace prac

#endif  // PRAC_MASK_HPP
