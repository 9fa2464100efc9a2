// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_NETWORK_HPP
#define PRAC_NETWORK_HPP

#include <string>
#include <vector>

#include "prac/error.hpp"
#include "prac/tensor.hpp"

namespace prac {

enum class LayerKind { FullyConnected, Conv2d, Relu, MaxPool2d, Flatten };

struct LayerDesc {
  LayerKind kind = LayerKind::Relu;
  // fully-connected
  Index in = 0, out = 0;
  bool bias = true;
  // conv2d
  Index in_channels = 0, out_channels = 0, kernel = 0, stride = 1, pad = 0;
  // max-pool2d
  Index pool_kernel = 0, pool_stride = 0;

  static LayerDesc fully_connected(Index in, Index out, bool bias = true) {
    LayerDesc d;
    d.kind = LayerKind::FullyConnected;
    d.in = in;
    d.out = out;
    d.bias = bias;
    return d;
  }
  static LayerDesc conv2d(Index in_ch, Index out_ch, Index kernel, Index stride = 1,
                          Index pad = 0, bool bias = true) {
    LayerDesc d;
    d.kind = LayerKind::Conv2d;
    d.in_channels = in_ch;
    d.out_channels = out_ch;
    d.kernel = kernel;
    d.stride = stride;
    d.pad = pad;
    d.bias = bias;
    return d;
  }
  static LayerDesc relu() { return LayerDesc{}; }
  static LayerDesc max_pool2d(Index kernel, Index stride) {
    LayerDesc d;
    d.kind = LayerKind::MaxPool2d;
    d.pool_kernel = kernel;
    d.pool_stride = stride;
    return d;
  }
  static LayerDesc flatten() {
    LayerDesc d;
    d.kind = LayerKind::Flatten;
    return d;
  }
};

// Per-sample output shape of one layer; throws InputError on any mismatch.
inline Shape infer_layer_shape(const LayerDesc& d, const Shape& in, std::size_t li) {
  const std::string at = "layer " + std::to_string(li);
  switch (d.kind) {
    case LayerKind::FullyConnected:
      require(in.size() == 1,
              at + ": fully-connected expects a flat input, got " + shape_str(in));
      require(in[0] == d.in, at + ": fully-connected expects width " +
                                 std::to_string(d.in) + ", got " + shape_str(in));
      require(d.out > 0, at + ": output width must be positive");
      return {d.out};
    case LayerKind::Conv2d: {
      require(in.size() == 3, at + ": conv2d expects [C,H,W], got " + shape_str(in));
      require(in[0] == d.in_channels, at + ": conv2d expects " +
                                          std::to_string(d.in_channels) +
                                          " channels, got " + shape_str(in));
      require(d.kernel > 0 && d.stride > 0 && d.pad >= 0 && d.out_channels > 0,
              at + ": bad conv2d geometry");
      const Index oh = (in[1] + 2 * d.pad - d.kernel) / d.stride + 1;
      const Index ow = (in[2] + 2 * d.pad - d.kernel) / d.stride + 1;
      require(oh > 0 && ow > 0, at + ": conv2d output collapses to zero");
      return {d.out_channels, oh, ow};
    }
    case LayerKind::Relu:
      return in;
    case LayerKind::MaxPool2d: {
      require(in.size() == 3, at + ": max-pool2d expects [C,H,W], got " + shape_str(in));
      require(d.pool_kernel > 0 && d.pool_stride > 0, at + ": bad pool geometry");
      const Index oh = (in[1] - d.pool_kernel) / d.pool_stride + 1;
      const Index ow = (in[2] - d.pool_kernel) / d.pool_stride + 1;
      require(oh > 0 && ow > 0, at + ": pool output collapses to zero");
      return {in[0], oh, ow};
    }
    case LayerKind::Flatten: {
      Index n = 1;
      for (Index v : in) n *= v;
      return {n};
    }
  }
  throw InputError(at + ": unknown layer kind");
}

inline std::vector<Shape> infer_io_shapes(const std::vector<LayerDesc>& layers,
                                          Shape input_shape) {
  std::vector<Shape> shapes;
  shapes.push_back(input_shape);
  Shape cur = std::move(input_shape);
  for (std::size_t li = 0; li < layers.size(); ++li) {
    cur = infer_layer_shape(layers[li], cur, li);
    shapes.push_back(cur);
  }
  return shapes;
}

// Layer stack with shapes checked at construction. io_shapes[i] is the
// per-sample shape entering layer i; io_shapes.back() leaves the last layer.
struct NetworkSpec {
  std::vector<LayerDesc> layers;
  int class_count = 0;
  std::vector<Shape> io_shapes;

  NetworkSpec() = default;
  NetworkSpec(std::vector<LayerDesc> ls, int classes, Shape input_shape)
      : layers(std::move(ls)), class_count(classes) {
    require(class_count > 0, "class count must be positive");
    io_shapes = infer_io_shapes(layers, std::move(input_shape));
    const Shape& out = io_shapes.back();
    require(out.size() == 1 && out[0] == class_count,
            "final layer output " + shape_str(out) + " does not match class count " +
                std::to_string(class_count));
  }

  const Shape& input_shape() const { return io_shapes.front(); }
};

// Reference architectures. The MLP flattens any input; the CNN wants [C,H,W].
inline NetworkSpec make_mlp(const Shape& input_shape, int classes) {
  Index dim = 1;
  for (Index v : input_shape) dim *= v;
  std::vector<LayerDesc> layers;
  if (input_shape.size() != 1) layers.push_back(LayerDesc::flatten());
  layers.push_back(LayerDesc::fully_connected(dim, 300));
  layers.push_back(LayerDesc::relu());
  layers.push_back(LayerDesc::fully_connected(300, 100));
  layers.push_back(LayerDesc::relu());
  layers.push_back(LayerDesc::fully_connected(100, classes));
  return NetworkSpec(std::move(layers), classes, input_shape);
}

inline NetworkSpec make_cnn(const Shape& input_shape, int classes) {
  require(input_shape.size() == 3, "cnn wants [C,H,W] input, got " + shape_str(input_shape));
  std::vector<LayerDesc> layers;
  layers.push_back(LayerDesc::conv2d(input_shape[0], 8, 5, 1, 2));
  layers.push_back(LayerDesc::relu());
  layers.push_back(LayerDesc::max_pool2d(2, 2));
  layers.push_back(LayerDesc::conv2d(8, 16, 5, 1, 2));
  layers.push_back(LayerDesc::relu());
  layers.push_back(LayerDesc::max_pool2d(2, 2));
  layers.push_back(LayerDesc::flatten());
  const Index flat = infer_io_shapes(layers, input_shape).back()[0];
  layers.push_back(LayerDesc::fully_connected(flat, 64));
  layers.push_back(LayerDesc::relu());
  layers.push_back(LayerDesc::fully_connected(64, classes));
  return NetworkSpec(std::move(layers), classes, input_shape);
}

inline NetworkSpec make_network(const std::string& arch, const Shape& input_shape,
                                int classes) {
  if (arch == "mlp") return make_mlp(input_shape, classes);
  if (arch == "cnn") return make_cnn(input_shape, classes);
  throw InputError("unknown architecture '" + arch + "' (expected mlp or cnn)");
}

}  // namespace prac

#endif  // PRAC_NETWORK_HPP
