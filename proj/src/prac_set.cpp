// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#include "prac/prac_set.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "prac/error.hpp"

namespace prac {

PracSet build_prac(std::span<const std::size_t> cet, std::span<const std::size_t> cep) {
  std::vector<std::size_t> a(cet.begin(), cet.end());
  std::vector<std::size_t> b(cep.begin(), cep.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());

  PracSet set;
  set.cet_size = a.size();
  set.cep_size = b.size();
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    std::size_t idx;
    std::uint8_t prov = 0;
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      idx = a[i++];
      prov = PracSet::FromCet;
    } else if (i == a.size() || b[j] < a[i]) {
      idx = b[j++];
      prov = PracSet::FromCep;
    } else {
      idx = a[i];
      prov = PracSet::FromCet | PracSet::FromCep;
      ++i;
      ++j;
    }
    set.indices.push_back(idx);
    set.provenance.push_back(prov);
  }
  return set;
}

double overlap_rate(std::span<const std::size_t> cep, std::span<const std::size_t> cet) {
  require(!cep.empty(), "overlap rate undefined for empty CEP");
  std::set<std::size_t> cet_set(cet.begin(), cet.end());
  std::set<std::size_t> cep_set(cep.begin(), cep.end());
  std::size_t inter = 0;
  for (std::size_t idx : cep_set) inter += cet_set.count(idx);
  return static_cast<double>(inter) / static_cast<double>(cep_set.size());
}

std::vector<std::size_t> class_histogram(const PracSet& set, std::span<const int> labels,
                                         int class_count) {
  require(class_count > 0, "class count must be positive");
  std::vector<std::size_t> counts(static_cast<std::size_t>(class_count), 0);
  for (std::size_t idx : set.indices) {
    require(idx < labels.size(), "set index outside the label array");
    const int label = labels[idx];
    require(label >= 0 && label < class_count, "label out of range in histogram");
    ++counts[static_cast<std::size_t>(label)];
  }
  return counts;
}

void save_prac(const std::string& path, const PracSet& set, int round) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path);
  os << "# prac round=" << round << " |CET|=" << set.cet_size << " |CEP|=" << set.cep_size
     << " |PrAC|=" << set.indices.size() << "\n";
  for (std::size_t idx : set.indices) os << idx << "\n";
  if (!os) throw DataError("write failed: " + path);
}

PracSet load_prac(const std::string& path, int* round) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open for reading: " + path);
  std::string header;
  if (!std::getline(is, header)) throw DataError("empty file: " + path);
  PracSet set;
  int r = 0;
  unsigned long long cet = 0, cep = 0, total = 0;
  if (std::sscanf(header.c_str(), "# prac round=%d |CET|=%llu |CEP|=%llu |PrAC|=%llu", &r,
                  &cet, &cep, &total) != 4)
    throw DataError("bad header in " + path);
  if (round) *round = r;
  set.cet_size = cet;
  set.cep_size = cep;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    set.indices.push_back(std::stoull(line));
  }
  if (set.indices.size() != total)
    throw DataError("index count does not match header in " + path);
  if (!std::is_sorted(set.indices.begin(), set.indices.end()))
    throw DataError("indices out of order in " + path);
  if (std::adjacent_find(set.indices.begin(), set.indices.end()) != set.indices.end())
    throw DataError("duplicate indices in " + path);
  set.provenance.assign(set.indices.size(), 0);  // not stored in the text format
  return set;
}

}  // namespace prac
