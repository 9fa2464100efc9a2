// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_DATA_HPP
#define PRAC_DATA_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prac/error.hpp"
#include "prac/rng.hpp"
#include "prac/tensor.hpp"

namespace prac {

// Labeled samples, either 8-bit image planes [N,C,H,W] or real vectors [N,D].
// Samples are addressed by their original index everywhere downstream, so
// splits and slimmed subsets are plain index lists into this storage.
struct Dataset {
  enum class Kind { Images8, RealVec };

  Kind kind = Kind::Images8;
  std::string name;
  long n = 0;
  long channels = 0, height = 0, width = 0;  // Images8
  std::vector<std::uint8_t> pixels;
  long dim = 0;  // RealVec
  std::vector<double> reals;
  std::vector<int> labels;
  int class_count = 0;

  Shape sample_shape() const {
    return kind == Kind::Images8 ? Shape{channels, height, width} : Shape{dim};
  }
  long sample_size() const {
    return kind == Kind::Images8 ? channels * height * width : dim;
  }
  void validate() const;
};

// IDX files (big-endian, standard magic). Images may be [N,H,W] (one channel)
// or [N,C,H,W]; labels are a rank-1 ubyte array of the same length.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);
void save_idx(const std::string& images_path, const std::string& labels_path,
              const Dataset& ds);

// Raw labeled binary: records of [1 label byte][C*H*W pixel bytes].
Dataset load_raw_labeled(const std::string& path, long channels, long height, long width,
                         int class_count);
void save_raw_labeled(const std::string& path, const Dataset& ds);

struct SplitSpec {
  double val_fraction = 0.10;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<std::size_t> train;  // sorted original indices
  std::vector<std::size_t> val;
};

// Deterministic disjoint, exhaustive split; indices refer to the original set.
Split split_dataset(const Dataset& ds, const SplitSpec& spec);

struct AugmentConfig {
  int pad = 4;
  bool random_crop = false;
  bool horizontal_flip = false;
  std::vector<double> mean;  // per channel; empty means 0
  std::vector<double> stddev;  // per channel; empty means 1
};

// Pad-with-zeros, crop back to size at a uniform offset, then flip with
// probability 1/2. Two draws per sample for the crop, one for the flip, in
// that order. Only image data is augmented.
std::vector<std::uint8_t> augment_image(std::span<const std::uint8_t> img, long channels,
                                        long height, long width, const AugmentConfig& cfg,
                                        RngStream& rng);

struct SynthSpec {
  int classes = 10;
  std::array<long, 3> shape{1, 12, 12};  // C,H,W
  long per_class = 1000;
  double spread = 28.0;             // pixel-level noise sigma
  double ambiguous_fraction = 0.12; // blended between two class centers
  std::uint64_t seed = 7;
  std::uint64_t salt = 0;           // distinguishes train/test draws, same centers
  bool as_real_vec = false;
};

// Gaussian class clusters in pixel space with a controllable share of
// deliberately ambiguous samples placed between two class centers.
Dataset synthesize(const SynthSpec& spec);

// Training-time batch assembly. Augmentation applies only when `rng` is
// given; normalization applies always (pixels map to (v/255 - mean)/std).
template <class Scalar>
Tensor<Scalar> assemble_batch(const Dataset& ds, std::span<const std::size_t> ids,
                              const AugmentConfig& cfg, RngStream* rng) {
  const long ss = ds.sample_size();
  Shape shape;
  shape.push_back(static_cast<Index>(ids.size()));
  for (Index d : ds.sample_shape()) shape.push_back(d);
  Tensor<Scalar> batch(shape);
  Scalar* out = batch.data();
  if (ds.kind == Dataset::Kind::RealVec) {
    for (std::size_t k = 0; k < ids.size(); ++k) {
      require(ids[k] < static_cast<std::size_t>(ds.n), "sample index out of range");
      const double* src = ds.reals.data() + static_cast<long>(ids[k]) * ss;
      for (long i = 0; i < ss; ++i) out[k * ss + i] = static_cast<Scalar>(src[i]);
    }
    return batch;
  }
  const long plane = ds.height * ds.width;
  const bool want_aug = rng && (cfg.random_crop || cfg.horizontal_flip);
  std::vector<std::uint8_t> scratch;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    require(ids[k] < static_cast<std::size_t>(ds.n), "sample index out of range");
    std::span<const std::uint8_t> img(ds.pixels.data() + static_cast<long>(ids[k]) * ss,
                                      static_cast<std::size_t>(ss));
    if (want_aug) {
      scratch = augment_image(img, ds.channels, ds.height, ds.width, cfg, *rng);
      img = std::span<const std::uint8_t>(scratch.data(), scratch.size());
    }
    for (long c = 0; c < ds.channels; ++c) {
      const double mean = c < static_cast<long>(cfg.mean.size()) ? cfg.mean[c] : 0.0;
      const double sd = c < static_cast<long>(cfg.stddev.size()) ? cfg.stddev[c] : 1.0;
      for (long i = 0; i < plane; ++i) {
        const double v = static_cast<double>(img[c * plane + i]) / 255.0;
        out[k * ss + c * plane + i] = static_cast<Scalar>((v - mean) / sd);
      }
    }
  }
  return batch;
}

inline std::vector<int> gather_labels(const Dataset& ds, std::span<const std::size_t> ids) {
  std::vector<int> out(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    require(ids[k] < ds.labels.size(), "label index out of range");
    out[k] = ds.labels[ids[k]];
  }
  return out;
}

}  // namespace prac

#endif  // PRAC_DATA_HPP
