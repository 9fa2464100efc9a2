// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_DISAGREEMENT_HPP
#define PRAC_DISAGREEMENT_HPP

#include <span>
#include <vector>

#include "prac/data.hpp"
#include "prac/layers.hpp"
#include "prac/mask.hpp"
#include "prac/network.hpp"
#include "prac/params.hpp"

namespace prac {

// Samples whose predicted class changes when the mask tightens from
// `before` to `after` at the given trained weights. Predictions use
// un-augmented inputs; ties resolve to the lowest class index. The scan
// covers `pool` (normally the full base training set) in index order.
template <class Scalar>
std::vector<std::size_t> select_cep(const NetworkSpec& net, const ParameterSet<Scalar>& theta,
                                    const SparseMask& before, const SparseMask& after,
                                    const Dataset& ds, std::span<const std::size_t> pool,
                                    const AugmentConfig& normalization, long batch_size = 512) {
  std::vector<std::size_t> out;
  if (pool.empty()) return out;
  for (std::size_t start = 0; start < pool.size(); start += batch_size) {
    const std::size_t stop = std::min(pool.size(), start + static_cast<std::size_t>(batch_size));
    std::span<const std::size_t> ids = pool.subspan(start, stop - start);
    const Tensor<Scalar> batch = assemble_batch<Scalar>(ds, ids, normalization, nullptr);
    const std::vector<int> a = argmax_rows(forward(net, theta, &before, batch));
    const std::vector<int> b = argmax_rows(forward(net, theta, &after, batch));
    for (std::size_t k = 0; k < ids.size(); ++k)
      if (a[k] != b[k]) out.push_back(ids[k]);
  }
  return out;
}

}  // namespace prac

#endif  // PRAC_DISAGREEMENT_HPP
