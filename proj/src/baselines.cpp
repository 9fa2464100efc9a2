// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#include "prac/baselines.hpp"

namespace prac {

std::string baseline_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::VanillaLt: return "vanilla-lt";
    case BaselineKind::RandomPrune: return "random-prune";
    case BaselineKind::RandomTicket: return "random-ticket";
    case BaselineKind::RandomSubset: return "random-subset";
    case BaselineKind::EntropySubset: return "entropy-subset";
    case BaselineKind::SnipIterative: return "snip-iterative";
  }
  throw InputError("unknown baseline kind");
}

BaselineKind baseline_from_name(const std::string& name) {
  if (name == "vanilla-lt") return BaselineKind::VanillaLt;
  if (name == "random-prune") return BaselineKind::RandomPrune;
  if (name == "random-ticket") return BaselineKind::RandomTicket;
  if (name == "random-subset") return BaselineKind::RandomSubset;
  if (name == "entropy-subset") return BaselineKind::EntropySubset;
  if (name == "snip-iterative") return BaselineKind::SnipIterative;
  throw InputError("unknown baseline '" + name + "'");
}

SparseMask random_prune_mask(const SparseMask& reference, std::uint64_t seed, bool global) {
  SparseMask out = reference;
  RngStream rng = RngStream(seed).derive("random-prune");
  if (global) {
    std::size_t survivors = reference.ones();
    std::vector<std::pair<std::size_t, std::size_t>> positions;  // (entry, flat)
    positions.reserve(reference.total());
    for (std::size_t e = 0; e < out.entries.size(); ++e) {
      auto& bits = out.entries[e].bits;
      for (std::size_t i = 0; i < bits.size(); ++i) {
        bits[i] = 0;
        positions.emplace_back(e, i);
      }
    }
    shuffle(positions, rng);
    for (std::size_t k = 0; k < survivors; ++k)
      out.entries[positions[k].first].bits[positions[k].second] = 1;
    return out;
  }
  for (std::size_t e = 0; e < out.entries.size(); ++e) {
    const auto& ref_bits = reference.entries[e].bits;
    std::size_t survivors = 0;
    for (std::uint8_t b : ref_bits) survivors += b;
    auto& bits = out.entries[e].bits;
    std::vector<std::size_t> idx(bits.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    shuffle(idx, rng);
    std::fill(bits.begin(), bits.end(), std::uint8_t{0});
    for (std::size_t k = 0; k < survivors; ++k) bits[idx[k]] = 1;
  }
  return out;
}

SparseMask random_prune_within(const SparseMask& parent, const SparseMask& reference,
                               RngStream& rng) {
  require(parent.same_alignment(reference), "mask layouts differ");
  SparseMask out = parent;
  for (std::size_t e = 0; e < out.entries.size(); ++e) {
    std::size_t target = 0;
    for (std::uint8_t b : reference.entries[e].bits) target += b;
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < parent.entries[e].bits.size(); ++i)
      if (parent.entries[e].bits[i]) kept.push_back(i);
    require(target <= kept.size(),
            "reference keeps more weights than the parent at " + out.entries[e].name);
    shuffle(kept, rng);
    std::fill(out.entries[e].bits.begin(), out.entries[e].bits.end(), std::uint8_t{0});
    for (std::size_t k = 0; k < target; ++k) out.entries[e].bits[kept[k]] = 1;
  }
  return out;
}

}  // namespace prac
