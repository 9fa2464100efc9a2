// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_OPTIMIZER_HPP
#define PRAC_OPTIMIZER_HPP

#include "prac/layers.hpp"
#include "prac/params.hpp"

namespace prac {

// SGD with momentum and L2 weight decay:
//   v <- momentum * v + (g + weight_decay * w)
//   w <- w - lr * v
// Masked positions are re-zeroed (weight and buffer) after every step.
template <class Scalar>
struct OptimizerState {
  ParameterSet<Scalar> momentum_buffers;
  double momentum = 0.9;
  double weight_decay = 1e-4;

  static OptimizerState zeros_like(const ParameterSet<Scalar>& params, double momentum = 0.9,
                                   double weight_decay = 1e-4) {
    OptimizerState s;
    s.momentum_buffers = ParameterSet<Scalar>::zeros_like(params);
    s.momentum = momentum;
    s.weight_decay = weight_decay;
    return s;
  }
};

template <class Scalar>
void sgd_step(ParameterSet<Scalar>& params, const ParameterSet<Scalar>& grads,
              OptimizerState<Scalar>& opt, double lr, const SparseMask* mask = nullptr) {
  require(params.entries.size() == grads.entries.size() &&
              params.entries.size() == opt.momentum_buffers.entries.size(),
          "optimizer step needs aligned parameters, gradients and buffers");
  const Scalar mu = static_cast<Scalar>(opt.momentum);
  const Scalar wd = static_cast<Scalar>(opt.weight_decay);
  const Scalar eta = static_cast<Scalar>(lr);
  for (std::size_t k = 0; k < params.entries.size(); ++k) {
    auto& w = params.entries[k].tensor;
    const auto& g = grads.entries[k].tensor;
    auto& v = opt.momentum_buffers.entries[k].tensor;
    require(w.size() == g.size() && w.size() == v.size(),
            "shape mismatch in optimizer step at " + params.entries[k].name);
    v.values = mu * v.values + (g.values + wd * w.values);
    w.values -= eta * v.values;
    if (mask && params.entries[k].prunable) {
      const SparseMask::Entry* m = mask->find(params.entries[k].name);
      require(m != nullptr, "mask missing entry " + params.entries[k].name);
      for (Index i = 0; i < w.size(); ++i) {
        if (!m->bits[static_cast<std::size_t>(i)]) {
          w[i] = Scalar(0);
          v[i] = Scalar(0);
        }
      }
    }
    if (!w.all_finite()) throw NumericError("non-finite weights after step at " +
                                            params.entries[k].name);
  }
}

}  // namespace prac

#endif  // PRAC_OPTIMIZER_HPP
