// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_LAYERS_HPP
#define PRAC_LAYERS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "prac/mask.hpp"
#include "prac/network.hpp"
#include "prac/params.hpp"
#include "prac/tensor.hpp"

namespace prac {

// Subnetwork semantics: computing with mask m is computing with m .* weights.
template <class Scalar>
ParameterSet<Scalar> apply_mask(const ParameterSet<Scalar>& params, const SparseMask& mask) {
  ParameterSet<Scalar> out = params;
  for (auto& e : out.entries) {
    if (!e.prunable) continue;
    const SparseMask::Entry* m = mask.find(e.name);
    require(m != nullptr && static_cast<Index>(m->bits.size()) == e.tensor.size(),
            "mask is not aligned to parameter " + e.name);
    for (Index i = 0; i < e.tensor.size(); ++i)
      if (!m->bits[static_cast<std::size_t>(i)]) e.tensor[i] = Scalar(0);
  }
  return out;
}

template <class Scalar>
SparseMask dense_mask(const ParameterSet<Scalar>& params) {
  std::vector<std::pair<std::string, std::size_t>> layout;
  for (const auto& e : params.entries)
    if (e.prunable) layout.emplace_back(e.name, static_cast<std::size_t>(e.tensor.size()));
  return ones_mask(layout);
}

template <class Scalar>
struct ForwardTrace {
  // acts[i] is the input to layer i; acts[layers] holds the logits.
  std::vector<Tensor<Scalar>> acts;
  // per-layer scratch kept for the backward pass
  std::vector<std::vector<Index>> pool_argmax;
  std::vector<Tensor<Scalar>> conv_patches;
};

namespace detail {

template <class Scalar>
Tensor<Scalar> fc_forward(const LayerDesc& d, const Tensor<Scalar>& w,
                          const Tensor<Scalar>* b, const Tensor<Scalar>& x, Index batch) {
  Tensor<Scalar> y({batch, d.out});
  auto Y = y.matrix(batch, d.out);
  Y.noalias() = x.matrix(batch, d.in) * w.matrix(d.in, d.out);
  if (b) Y.rowwise() += ConstVectorMap<Scalar>(b->data(), d.out).transpose();
  return y;
}

// Patch matrix for conv: rows (b, oh, ow), cols (c, ky, kx). Out-of-range
// input positions contribute zeros (implicit padding).
template <class Scalar>
Tensor<Scalar> im2col(const LayerDesc& d, const Tensor<Scalar>& x, Index batch, Index h,
                      Index w, Index oh, Index ow) {
  const Index ckk = d.in_channels * d.kernel * d.kernel;
  Tensor<Scalar> patches({batch * oh * ow, ckk});
  Scalar* out = patches.data();
  const Scalar* in = x.data();
  const Index plane = h * w;
  const Index sample = d.in_channels * plane;
  for (Index b = 0; b < batch; ++b) {
    for (Index oy = 0; oy < oh; ++oy) {
      for (Index ox = 0; ox < ow; ++ox) {
        Scalar* row = out + ((b * oh + oy) * ow + ox) * ckk;
        for (Index c = 0; c < d.in_channels; ++c) {
          const Scalar* src = in + b * sample + c * plane;
          for (Index ky = 0; ky < d.kernel; ++ky) {
            const Index iy = oy * d.stride - d.pad + ky;
            for (Index kx = 0; kx < d.kernel; ++kx) {
              const Index ix = ox * d.stride - d.pad + kx;
              const bool inside = iy >= 0 && iy < h && ix >= 0 && ix < w;
              *row++ = inside ? src[iy * w + ix] : Scalar(0);
            }
          }
        }
      }
    }
  }
  return patches;
}

template <class Scalar>
void col2im_accumulate(const LayerDesc& d, const Tensor<Scalar>& dpatches, Index batch,
                       Index h, Index w, Index oh, Index ow, Tensor<Scalar>& dx) {
  const Index ckk = d.in_channels * d.kernel * d.kernel;
  const Scalar* in = dpatches.data();
  Scalar* out = dx.data();
  const Index plane = h * w;
  const Index sample = d.in_channels * plane;
  for (Index b = 0; b < batch; ++b) {
    for (Index oy = 0; oy < oh; ++oy) {
      for (Index ox = 0; ox < ow; ++ox) {
        const Scalar* row = in + ((b * oh + oy) * ow + ox) * ckk;
        for (Index c = 0; c < d.in_channels; ++c) {
          Scalar* dst = out + b * sample + c * plane;
          for (Index ky = 0; ky < d.kernel; ++ky) {
            const Index iy = oy * d.stride - d.pad + ky;
            for (Index kx = 0; kx < d.kernel; ++kx) {
              const Index ix = ox * d.stride - d.pad + kx;
              if (iy >= 0 && iy < h && ix >= 0 && ix < w) dst[iy * w + ix] += *row;
              ++row;
            }
          }
        }
      }
    }
  }
}

}  // namespace detail

// Forward pass over a batch whose leading dimension is the batch size.
// When trace is given, per-layer inputs and conv/pool scratch are kept so a
// backward pass can follow. Throws NumericError if the logits go non-finite.
template <class Scalar>
Tensor<Scalar> forward(const NetworkSpec& net, const ParameterSet<Scalar>& params,
                       const SparseMask* mask, const Tensor<Scalar>& batch,
                       ForwardTrace<Scalar>* trace = nullptr) {
  require(!batch.shape.empty(), "batch tensor needs a leading batch dimension");
  const Index bsz = batch.shape[0];
  {
    Shape per_sample(batch.shape.begin() + 1, batch.shape.end());
    require(per_sample == net.input_shape(),
            "batch sample shape " + shape_str(per_sample) + " does not match network input " +
                shape_str(net.input_shape()));
  }

  const ParameterSet<Scalar> masked =
      mask ? apply_mask(params, *mask) : ParameterSet<Scalar>{};
  const ParameterSet<Scalar>& p = mask ? masked : params;

  if (trace) {
    trace->acts.clear();
    trace->pool_argmax.assign(net.layers.size(), {});
    trace->conv_patches.assign(net.layers.size(), {});
  }

  Tensor<Scalar> cur = batch;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const LayerDesc& d = net.layers[li];
    if (trace) trace->acts.push_back(cur);
    const Shape& in_shape = net.io_shapes[li];
    const Shape& out_shape = net.io_shapes[li + 1];
    switch (d.kind) {
      case LayerKind::FullyConnected: {
        const auto* we = p.find(std::to_string(li) + ".weight");
        const auto* be = d.bias ? p.find(std::to_string(li) + ".bias") : nullptr;
        require(we != nullptr, "missing weights for layer " + std::to_string(li));
        cur = detail::fc_forward(d, we->tensor, be ? &be->tensor : nullptr, cur, bsz);
        break;
      }
      case LayerKind::Conv2d: {
        const auto* we = p.find(std::to_string(li) + ".weight");
        const auto* be = d.bias ? p.find(std::to_string(li) + ".bias") : nullptr;
        require(we != nullptr, "missing weights for layer " + std::to_string(li));
        const Index h = in_shape[1], w = in_shape[2];
        const Index oh = out_shape[1], ow = out_shape[2];
        const Index ckk = d.in_channels * d.kernel * d.kernel;
        Tensor<Scalar> patches = detail::im2col(d, cur, bsz, h, w, oh, ow);
        // weight [OC, C, K, K] flattens row-major to [OC, CKK]
        Tensor<Scalar> prod({bsz * oh * ow, d.out_channels});
        prod.matrix(bsz * oh * ow, d.out_channels).noalias() =
            patches.matrix(bsz * oh * ow, ckk) *
            we->tensor.matrix(d.out_channels, ckk).transpose();
        if (be)
          prod.matrix(bsz * oh * ow, d.out_channels).rowwise() +=
              ConstVectorMap<Scalar>(be->tensor.data(), d.out_channels).transpose();
        // scatter rows (b,oh,ow) x cols (oc) into NCHW
        Tensor<Scalar> y({bsz, d.out_channels, oh, ow});
        const Scalar* src = prod.data();
        Scalar* dst = y.data();
        const Index spatial = oh * ow;
        for (Index b = 0; b < bsz; ++b)
          for (Index s = 0; s < spatial; ++s)
            for (Index oc = 0; oc < d.out_channels; ++oc)
              dst[(b * d.out_channels + oc) * spatial + s] =
                  src[(b * spatial + s) * d.out_channels + oc];
        if (trace) trace->conv_patches[li] = std::move(patches);
        cur = std::move(y);
        break;
      }
      case LayerKind::Relu: {
        Tensor<Scalar> y = cur;
        y.values = y.values.cwiseMax(Scalar(0));
        cur = std::move(y);
        break;
      }
      case LayerKind::MaxPool2d: {
        const Index c = in_shape[0], h = in_shape[1], w = in_shape[2];
        const Index oh = out_shape[1], ow = out_shape[2];
        Tensor<Scalar> y({bsz, c, oh, ow});
        std::vector<Index> argmax(static_cast<std::size_t>(bsz * c * oh * ow));
        const Scalar* in = cur.data();
        Scalar* out = y.data();
        Index o = 0;
        for (Index b = 0; b < bsz; ++b) {
          for (Index ch = 0; ch < c; ++ch) {
            const Scalar* plane = in + (b * c + ch) * h * w;
            const Index plane_off = (b * c + ch) * h * w;
            for (Index oy = 0; oy < oh; ++oy) {
              for (Index ox = 0; ox < ow; ++ox) {
                Scalar best{};
                Index best_idx = -1;
                for (Index ky = 0; ky < d.pool_kernel; ++ky) {
                  const Index iy = oy * d.pool_stride + ky;
                  if (iy >= h) continue;
                  for (Index kx = 0; kx < d.pool_kernel; ++kx) {
                    const Index ix = ox * d.pool_stride + kx;
                    if (ix >= w) continue;
                    const Scalar v = plane[iy * w + ix];
                    if (best_idx < 0 || v > best) {
                      best = v;
                      best_idx = plane_off + iy * w + ix;
                    }
                  }
                }
                out[o] = best;
                argmax[static_cast<std::size_t>(o)] = best_idx;
                ++o;
              }
            }
          }
        }
        if (trace) trace->pool_argmax[li] = std::move(argmax);
        cur = std::move(y);
        break;
      }
      case LayerKind::Flatten: {
        Shape s{bsz, out_shape[0]};
        cur.shape = std::move(s);
        break;
      }
    }
  }
  check_finite(cur, "network logits");
  if (trace) trace->acts.push_back(cur);
  return cur;
}

// Mean softmax cross-entropy; optionally the gradient wrt logits.
template <class Scalar>
double softmax_cross_entropy(const Tensor<Scalar>& logits, std::span<const int> labels,
                             Tensor<Scalar>* dlogits = nullptr) {
  const Index bsz = logits.shape[0];
  const Index classes = logits.shape[1];
  require(static_cast<Index>(labels.size()) == bsz, "labels/batch size mismatch");
  if (dlogits) *dlogits = Tensor<Scalar>({bsz, classes});
  double total = 0.0;
  for (Index b = 0; b < bsz; ++b) {
    const Scalar* row = logits.data() + b * classes;
    require(labels[static_cast<std::size_t>(b)] >= 0 &&
                labels[static_cast<std::size_t>(b)] < classes,
            "label out of range");
    Scalar mx = row[0];
    for (Index c = 1; c < classes; ++c) mx = std::max(mx, row[c]);
    double sum = 0.0;
    for (Index c = 0; c < classes; ++c) sum += std::exp(static_cast<double>(row[c] - mx));
    const double lse = std::log(sum);
    const int y = labels[static_cast<std::size_t>(b)];
    total += lse - static_cast<double>(row[y] - mx);
    if (dlogits) {
      Scalar* drow = dlogits->data() + b * classes;
      for (Index c = 0; c < classes; ++c) {
        const double p = std::exp(static_cast<double>(row[c] - mx) - lse);
        drow[c] = static_cast<Scalar>((p - (c == y ? 1.0 : 0.0)) / static_cast<double>(bsz));
      }
    }
  }
  const double loss = total / static_cast<double>(bsz);
  if (!std::isfinite(loss)) throw NumericError("non-finite loss");
  return loss;
}

// Row-wise argmax; ties go to the lowest class index.
template <class Scalar>
std::vector<int> argmax_rows(const Tensor<Scalar>& logits) {
  const Index bsz = logits.shape[0];
  const Index classes = logits.shape[1];
  std::vector<int> out(static_cast<std::size_t>(bsz));
  for (Index b = 0; b < bsz; ++b) {
    const Scalar* row = logits.data() + b * classes;
    int best = 0;
    for (Index c = 1; c < classes; ++c)
      if (row[c] > row[best]) best = static_cast<int>(c);
    out[static_cast<std::size_t>(b)] = best;
  }
  return out;
}

template <class Scalar>
struct BackwardOut {
  double loss = 0.0;
  ParameterSet<Scalar> grads;
  std::vector<int> predictions;  // pre-update argmax, one per sample
};

// Loss and gradients in one pass. Gradients at masked-out weight positions
// are forced to exactly zero.
template <class Scalar>
BackwardOut<Scalar> backward(const NetworkSpec& net, const ParameterSet<Scalar>& params,
                             const SparseMask* mask, const Tensor<Scalar>& batch,
                             std::span<const int> labels) {
  const Index bsz = batch.shape[0];
  ForwardTrace<Scalar> trace;
  const Tensor<Scalar> logits = forward(net, params, mask, batch, &trace);

  BackwardOut<Scalar> out;
  out.predictions = argmax_rows(logits);
  out.grads = ParameterSet<Scalar>::zeros_like(params);

  Tensor<Scalar> delta;
  out.loss = softmax_cross_entropy(logits, labels, &delta);

  const ParameterSet<Scalar> masked =
      mask ? apply_mask(params, *mask) : ParameterSet<Scalar>{};
  const ParameterSet<Scalar>& p = mask ? masked : params;

  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const LayerDesc& d = net.layers[li];
    const Shape& in_shape = net.io_shapes[li];
    const Shape& out_shape = net.io_shapes[li + 1];
    const Tensor<Scalar>& x = trace.acts[li];
    switch (d.kind) {
      case LayerKind::FullyConnected: {
        const auto* we = p.find(std::to_string(li) + ".weight");
        auto* gw = out.grads.find(std::to_string(li) + ".weight");
        auto* gb = d.bias ? out.grads.find(std::to_string(li) + ".bias") : nullptr;
        auto dY = delta.matrix(bsz, d.out);
        gw->tensor.matrix(d.in, d.out).noalias() = x.matrix(bsz, d.in).transpose() * dY;
        if (gb)
          VectorMap<Scalar>(gb->tensor.data(), d.out) = dY.colwise().sum().transpose();
        Tensor<Scalar> dx({bsz, d.in});
        dx.matrix(bsz, d.in).noalias() = dY * we->tensor.matrix(d.in, d.out).transpose();
        delta = std::move(dx);
        break;
      }
      case LayerKind::Conv2d: {
        const auto* we = p.find(std::to_string(li) + ".weight");
        auto* gw = out.grads.find(std::to_string(li) + ".weight");
        auto* gb = d.bias ? out.grads.find(std::to_string(li) + ".bias") : nullptr;
        const Index h = in_shape[1], w = in_shape[2];
        const Index oh = out_shape[1], ow = out_shape[2];
        const Index ckk = d.in_channels * d.kernel * d.kernel;
        const Index rows = bsz * oh * ow;
        // gather NCHW grad into rows (b,oh,ow) x cols (oc)
        Tensor<Scalar> dY({rows, d.out_channels});
        {
          const Scalar* src = delta.data();
          Scalar* dst = dY.data();
          const Index spatial = oh * ow;
          for (Index b = 0; b < bsz; ++b)
            for (Index s = 0; s < spatial; ++s)
              for (Index oc = 0; oc < d.out_channels; ++oc)
                dst[(b * spatial + s) * d.out_channels + oc] =
                    src[(b * d.out_channels + oc) * spatial + s];
        }
        const Tensor<Scalar>& patches = trace.conv_patches[li];
        gw->tensor.matrix(d.out_channels, ckk).noalias() =
            dY.matrix(rows, d.out_channels).transpose() * patches.matrix(rows, ckk);
        if (gb)
          VectorMap<Scalar>(gb->tensor.data(), d.out_channels) =
              dY.matrix(rows, d.out_channels).colwise().sum().transpose();
        Tensor<Scalar> dpatches({rows, ckk});
        dpatches.matrix(rows, ckk).noalias() =
            dY.matrix(rows, d.out_channels) * we->tensor.matrix(d.out_channels, ckk);
        Tensor<Scalar> dx({bsz, d.in_channels, h, w});
        detail::col2im_accumulate(d, dpatches, bsz, h, w, oh, ow, dx);
        delta = std::move(dx);
        break;
      }
      case LayerKind::Relu: {
        for (Index i = 0; i < delta.size(); ++i)
          if (x[i] <= Scalar(0)) delta[i] = Scalar(0);
        break;
      }
      case LayerKind::MaxPool2d: {
        Tensor<Scalar> dx(x.shape);
        const auto& argmax = trace.pool_argmax[li];
        for (std::size_t o = 0; o < argmax.size(); ++o)
          dx[argmax[o]] += delta[static_cast<Index>(o)];
        delta = std::move(dx);
        break;
      }
      case LayerKind::Flatten: {
        delta.shape = x.shape;
        break;
      }
    }
  }

  // freeze gradients at dropped positions
  if (mask) {
    for (auto& e : out.grads.entries) {
      if (!e.prunable) continue;
      const SparseMask::Entry* m = mask->find(e.name);
      for (Index i = 0; i < e.tensor.size(); ++i)
        if (!m->bits[static_cast<std::size_t>(i)]) e.tensor[i] = Scalar(0);
    }
  }
  for (const auto& e : out.grads.entries) check_finite(e.tensor, "gradient of " + e.name);
  return out;
}

// Convenience: forward in evaluation mode and count argmax hits.
template <class Scalar>
double accuracy(const NetworkSpec& net, const ParameterSet<Scalar>& params,
                const SparseMask* mask, const Tensor<Scalar>& batch,
                std::span<const int> labels) {
  const Tensor<Scalar> logits = forward(net, params, mask, batch);
  const std::vector<int> pred = argmax_rows(logits);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == labels[i];
  return labels.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace prac

#endif  // PRAC_LAYERS_HPP
