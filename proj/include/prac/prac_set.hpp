// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_PRAC_SET_HPP
#define PRAC_PRAC_SET_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prac/layers.hpp"
#include "prac/mask.hpp"
#include "prac/network.hpp"
#include "prac/params.hpp"

namespace prac {

// Union of the two critical-example pools: easy-to-forget samples from the
// training dynamics (CET) and samples where pruning changed the predicted
// class (CEP). Indices refer to the original dataset and stay stable across
// shuffling and slimming.
struct PracSet {
  enum Provenance : std::uint8_t { FromCet = 1, FromCep = 2 };

  std::vector<std::size_t> indices;       // sorted, duplicate-free
  std::vector<std::uint8_t> provenance;   // parallel to indices
  std::size_t cet_size = 0;
  std::size_t cep_size = 0;

  std::size_t size() const { return indices.size(); }
  std::size_t overlap() const { return cet_size + cep_size - indices.size(); }
};

PracSet build_prac(std::span<const std::size_t> cet, std::span<const std::size_t> cep);

// |CEP intersect CET| / |CEP|; throws InputError when CEP is empty.
double overlap_rate(std::span<const std::size_t> cep, std::span<const std::size_t> cet);

// Per-class sample counts over the set; counts sum to the set size.
std::vector<std::size_t> class_histogram(const PracSet& set, std::span<const int> labels,
                                         int class_count);

// Text export: a "# prac round=<k> |CET|=<a> |CEP|=<b> |PrAC|=<c>" header then
// one sorted sample index per line.
void save_prac(const std::string& path, const PracSet& set, int round);
PracSet load_prac(const std::string& path, int* round = nullptr);

}  // namespace prac

#endif  // PRAC_PRAC_SET_HPP
