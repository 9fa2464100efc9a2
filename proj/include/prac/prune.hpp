// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_PRUNE_HPP
#define PRAC_PRUNE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "prac/layers.hpp"
#include "prac/mask.hpp"
#include "prac/params.hpp"

namespace prac {

struct PruneConfig {
  double ratio = 0.2;      // fraction of the remaining weights to drop per round
  bool layerwise = false;  // rank within each tensor instead of globally
};

namespace detail {

struct ScoredWeight {
  double score;
  std::uint32_t entry;
  Index flat;
};

// Drop the k lowest-scoring survivors; ties resolved by (entry order, flat
// index) so the result is stable under re-runs.
inline void drop_lowest(std::vector<ScoredWeight>& scored, std::size_t k, SparseMask& mask,
                        const std::vector<std::uint32_t>& entry_map) {
  std::sort(scored.begin(), scored.end(), [](const ScoredWeight& a, const ScoredWeight& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.entry != b.entry) return a.entry < b.entry;
    return a.flat < b.flat;
  });
  for (std::size_t i = 0; i < k; ++i)
    mask.entries[entry_map[scored[i].entry]].bits[static_cast<std::size_t>(scored[i].flat)] = 0;
}

}  // namespace detail

// Core ranking rule shared by magnitude pruning and score-based variants:
// among currently surviving weights, flip floor(ratio * survivors) of the
// lowest scores to zero. Returns a new mask nested inside the input mask.
template <class Scalar, class ScoreFn>
SparseMask prune_by_score(const ParameterSet<Scalar>& params, const SparseMask& mask,
                          const PruneConfig& cfg, ScoreFn&& score) {
  require(cfg.ratio > 0.0 && cfg.ratio < 1.0, "prune ratio must be in (0, 1)");
  SparseMask out = mask;

  // map mask-entry order onto the prunable entries of the parameter set
  std::vector<std::uint32_t> entry_map;
  std::vector<const typename ParameterSet<Scalar>::Entry*> prunable;
  for (const auto& e : params.entries) {
    if (!e.prunable) continue;
    bool found = false;
    for (std::uint32_t mi = 0; mi < out.entries.size(); ++mi) {
      if (out.entries[mi].name == e.name) {
        require(out.entries[mi].bits.size() == static_cast<std::size_t>(e.tensor.size()),
                "mask misaligned at " + e.name);
        entry_map.push_back(mi);
        prunable.push_back(&e);
        found = true;
        break;
      }
    }
    require(found, "mask missing entry " + e.name);
  }

  auto prune_group = [&](const std::vector<std::uint32_t>& group) {
    std::vector<detail::ScoredWeight> scored;
    for (std::uint32_t gi : group) {
      const auto& bits = out.entries[entry_map[gi]].bits;
      const auto& tensor = prunable[gi]->tensor;
      for (Index i = 0; i < tensor.size(); ++i)
        if (bits[static_cast<std::size_t>(i)])
          scored.push_back({score(*prunable[gi], i), gi, i});
    }
    require(!scored.empty(), "cannot prune: no surviving weights");
    const std::size_t k =
        static_cast<std::size_t>(std::floor(cfg.ratio * static_cast<double>(scored.size())));
    require(k < scored.size(), "pruning would empty the network");
    detail::drop_lowest(scored, k, out, entry_map);
  };

  if (cfg.layerwise) {
    for (std::uint32_t gi = 0; gi < prunable.size(); ++gi) prune_group({gi});
  } else {
    std::vector<std::uint32_t> all(prunable.size());
    for (std::uint32_t gi = 0; gi < all.size(); ++gi) all[gi] = gi;
    prune_group(all);
  }
  return out;
}

// Iterative magnitude pruning step: drop the smallest |w| among survivors.
// Exact zeros score lowest and go first.
template <class Scalar>
SparseMask magnitude_prune(const ParameterSet<Scalar>& params, const SparseMask& mask,
                           const PruneConfig& cfg) {
  return prune_by_score(params, mask, cfg,
                        [](const typename ParameterSet<Scalar>::Entry& e, Index i) {
                          return std::abs(static_cast<double>(e.tensor[i]));
                        });
}

// What the next prune would produce; used for convergence monitoring only.
template <class Scalar>
SparseMask candidate_mask(const ParameterSet<Scalar>& params, const SparseMask& mask,
                          const PruneConfig& cfg) {
  return magnitude_prune(params, mask, cfg);
}

}  // namespace prac

#endif  // PRAC_PRUNE_HPP
