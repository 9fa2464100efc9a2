// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_PARAMS_HPP
#define PRAC_PARAMS_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "prac/binio.hpp"
#include "prac/network.hpp"
#include "prac/rng.hpp"
#include "prac/tensor.hpp"

namespace prac {

// Named weight tensors in a fixed order: layer index ascending, weight before
// bias. Biases are never prunable. Entry names look like "2.weight".
template <class Scalar>
struct ParameterSet {
  struct Entry {
    std::string name;
    Tensor<Scalar> tensor;
    bool prunable = false;
  };

  std::vector<Entry> entries;

  Index total_prunable() const {
    Index n = 0;
    for (const auto& e : entries)
      if (e.prunable) n += e.tensor.size();
    return n;
  }

  Index total_size() const {
    Index n = 0;
    for (const auto& e : entries) n += e.tensor.size();
    return n;
  }

  const Entry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
  Entry* find(const std::string& name) {
    for (auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }

  bool all_finite() const {
    for (const auto& e : entries)
      if (!e.tensor.all_finite()) return false;
    return true;
  }

  static ParameterSet zeros_like(const ParameterSet& other) {
    ParameterSet out;
    out.entries.reserve(other.entries.size());
    for (const auto& e : other.entries)
      out.entries.push_back({e.name, Tensor<Scalar>::zeros(e.tensor.shape), e.prunable});
    return out;
  }
};

// Weight layout per layer:
//   fully-connected: weight [in, out]  (y = x * W + b), bias [out]
//   conv2d:          weight [out_ch, in_ch, k, k],      bias [out_ch]
template <class Scalar>
ParameterSet<Scalar> zero_parameters(const NetworkSpec& net) {
  ParameterSet<Scalar> params;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const LayerDesc& d = net.layers[li];
    const std::string prefix = std::to_string(li);
    if (d.kind == LayerKind::FullyConnected) {
      params.entries.push_back({prefix + ".weight", Tensor<Scalar>({d.in, d.out}), true});
      if (d.bias)
        params.entries.push_back({prefix + ".bias", Tensor<Scalar>({d.out}), false});
    } else if (d.kind == LayerKind::Conv2d) {
      params.entries.push_back(
          {prefix + ".weight",
           Tensor<Scalar>({d.out_channels, d.in_channels, d.kernel, d.kernel}), true});
      if (d.bias)
        params.entries.push_back({prefix + ".bias", Tensor<Scalar>({d.out_channels}), false});
    }
  }
  return params;
}

// Fan-in-scaled uniform init, U(-sqrt(6/fan_in), sqrt(6/fan_in)); biases zero.
// Draws happen in entry order so a seed pins the whole initialization.
template <class Scalar>
ParameterSet<Scalar> init_parameters(const NetworkSpec& net, RngStream rng) {
  ParameterSet<Scalar> params = zero_parameters<Scalar>(net);
  for (auto& e : params.entries) {
    if (!e.prunable) continue;  // biases stay zero
    const Shape& s = e.tensor.shape;
    const Index fan_in = s.size() == 2 ? s[0] : s[1] * s[2] * s[3];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (Index i = 0; i < e.tensor.size(); ++i)
      e.tensor[i] = static_cast<Scalar>(rng.next_uniform(-bound, bound));
  }
  return params;
}

// Checkpoint format: "PRAC" magic, version, entry count, then per entry a
// name, rank, dims (u64) and raw little-endian f64 values. Values are stored
// as f64 regardless of the in-memory scalar.
inline constexpr std::uint32_t kCheckpointVersion = 1;

template <class Scalar>
void save_checkpoint(const std::string& path, const ParameterSet<Scalar>& params) {
  auto os = open_out(path);
  write_bytes(os, "PRAC", 4);
  write_le<std::uint32_t>(os, kCheckpointVersion);
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(params.entries.size()));
  for (const auto& e : params.entries) {
    write_string(os, e.name);
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(e.tensor.shape.size()));
    for (Index d : e.tensor.shape) write_le<std::uint64_t>(os, static_cast<std::uint64_t>(d));
    for (Index i = 0; i < e.tensor.size(); ++i)
      write_le<double>(os, static_cast<double>(e.tensor[i]));
  }
}

template <class Scalar>
ParameterSet<Scalar> load_checkpoint(const std::string& path) {
  auto is = open_in(path);
  char magic[4];
  read_bytes(is, magic, 4, "checkpoint magic");
  if (std::string(magic, 4) != "PRAC") throw DataError("bad checkpoint magic in " + path);
  const auto version = read_le<std::uint32_t>(is, "checkpoint version");
  if (version != kCheckpointVersion)
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  const auto count = read_le<std::uint32_t>(is, "checkpoint entry count");
  ParameterSet<Scalar> params;
  params.entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    typename ParameterSet<Scalar>::Entry e;
    e.name = read_string(is, "parameter name");
    const auto rank = read_le<std::uint32_t>(is, "parameter rank");
    Shape shape(rank);
    for (auto& d : shape) {
      const auto v = read_le<std::uint64_t>(is, "parameter dim");
      d = static_cast<Index>(v);
    }
    e.tensor = Tensor<Scalar>(shape);
    for (Index k = 0; k < e.tensor.size(); ++k)
      e.tensor[k] = static_cast<Scalar>(read_le<double>(is, "parameter values"));
    e.prunable = e.name.size() > 7 && e.name.compare(e.name.size() - 7, 7, ".weight") == 0;
    params.entries.push_back(std::move(e));
  }
  return params;
}

}  // namespace prac

#endif  // PRAC_PARAMS_HPP
