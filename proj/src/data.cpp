// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#include "prac/data.hpp"

#include <algorithm>
#include <cmath>

#include "prac/binio.hpp"

namespace prac {

void Dataset::validate() const {
  require(n > 0, "dataset is empty");
  require(static_cast<long>(labels.size()) == n, "label count does not match sample count");
  require(class_count > 0, "dataset needs a positive class count");
  for (int l : labels)
    require(l >= 0 && l < class_count, "label out of range in dataset " + name);
  if (kind == Kind::Images8) {
    require(channels > 0 && height > 0 && width > 0, "bad image geometry");
    require(static_cast<long>(pixels.size()) == n * sample_size(),
            "pixel buffer does not match geometry");
  } else {
    require(dim > 0, "bad vector dimension");
    require(static_cast<long>(reals.size()) == n * dim,
            "value buffer does not match geometry");
  }
}

namespace {

constexpr std::uint32_t kIdxUbyte = 0x08;

std::vector<std::uint32_t> read_idx_header(std::istream& is, const std::string& path) {
  const std::uint32_t magic = read_be32(is, "IDX magic");
  const std::uint32_t dtype = (magic >> 8) & 0xff;
  const std::uint32_t ndims = magic & 0xff;
  if ((magic >> 16) != 0) throw DataError("bad IDX magic in " + path);
  if (dtype != kIdxUbyte)
    throw DataError("unsupported IDX data type " + std::to_string(dtype) + " in " + path);
  if (ndims < 1 || ndims > 4) throw DataError("unsupported IDX rank in " + path);
  std::vector<std::uint32_t> dims(ndims);
  for (auto& d : dims) {
    d = read_be32(is, "IDX dimension");
    if (d == 0) throw DataError("zero IDX dimension in " + path);
  }
  return dims;
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  Dataset ds;
  ds.kind = Dataset::Kind::Images8;
  ds.name = images_path;
  {
    auto is = open_in(images_path);
    const auto dims = read_idx_header(is, images_path);
    require(dims.size() >= 3, "IDX image file needs rank >= 3: " + images_path);
    ds.n = dims[0];
    if (dims.size() == 3) {
      ds.channels = 1;
      ds.height = dims[1];
      ds.width = dims[2];
    } else {
      ds.channels = dims[1];
      ds.height = dims[2];
      ds.width = dims[3];
    }
    ds.pixels.resize(static_cast<std::size_t>(ds.n) * ds.sample_size());
    read_bytes(is, ds.pixels.data(), ds.pixels.size(), "IDX pixel data");
  }
  {
    auto is = open_in(labels_path);
    const auto dims = read_idx_header(is, labels_path);
    require(dims.size() == 1, "IDX label file must be rank 1: " + labels_path);
    if (static_cast<long>(dims[0]) != ds.n)
      throw DataError("IDX image/label counts differ");
    std::vector<std::uint8_t> raw(dims[0]);
    read_bytes(is, raw.data(), raw.size(), "IDX label data");
    ds.labels.assign(raw.begin(), raw.end());
  }
  ds.class_count = ds.labels.empty() ? 0 : *std::max_element(ds.labels.begin(), ds.labels.end()) + 1;
  ds.validate();
  return ds;
}

void save_idx(const std::string& images_path, const std::string& labels_path,
              const Dataset& ds) {
  require(ds.kind == Dataset::Kind::Images8, "only image datasets serialize to IDX");
  ds.validate();
  {
    auto os = open_out(images_path);
    const bool single = ds.channels == 1;
    write_be32(os, (kIdxUbyte << 8) | (single ? 3u : 4u));
    write_be32(os, static_cast<std::uint32_t>(ds.n));
    if (!single) write_be32(os, static_cast<std::uint32_t>(ds.channels));
    write_be32(os, static_cast<std::uint32_t>(ds.height));
    write_be32(os, static_cast<std::uint32_t>(ds.width));
    write_bytes(os, ds.pixels.data(), ds.pixels.size());
  }
  {
    auto os = open_out(labels_path);
    write_be32(os, (kIdxUbyte << 8) | 1u);
    write_be32(os, static_cast<std::uint32_t>(ds.n));
    std::vector<std::uint8_t> raw(ds.labels.begin(), ds.labels.end());
    write_bytes(os, raw.data(), raw.size());
  }
}

Dataset load_raw_labeled(const std::string& path, long channels, long height, long width,
                         int class_count) {
  require(channels > 0 && height > 0 && width > 0, "bad geometry for raw dataset");
  auto is = open_in(path);
  is.seekg(0, std::ios::end);
  const auto file_size = static_cast<long long>(is.tellg());
  is.seekg(0, std::ios::beg);
  const long long record = 1 + static_cast<long long>(channels) * height * width;
  if (file_size % record != 0)
    throw DataError("file size is not a multiple of the record size: " + path);
  Dataset ds;
  ds.kind = Dataset::Kind::Images8;
  ds.name = path;
  ds.channels = channels;
  ds.height = height;
  ds.width = width;
  ds.class_count = class_count;
  ds.n = static_cast<long>(file_size / record);
  ds.pixels.resize(static_cast<std::size_t>(ds.n) * ds.sample_size());
  ds.labels.resize(ds.n);
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(record));
  for (long i = 0; i < ds.n; ++i) {
    read_bytes(is, buf.data(), buf.size(), "raw record");
    if (buf[0] >= class_count)
      throw DataError("label " + std::to_string(buf[0]) + " out of range in " + path);
    ds.labels[i] = buf[0];
    std::copy(buf.begin() + 1, buf.end(), ds.pixels.begin() + i * ds.sample_size());
  }
  ds.validate();
  return ds;
}

void save_raw_labeled(const std::string& path, const Dataset& ds) {
  require(ds.kind == Dataset::Kind::Images8, "only image datasets serialize to raw records");
  ds.validate();
  auto os = open_out(path);
  const long ss = ds.sample_size();
  for (long i = 0; i < ds.n; ++i) {
    const std::uint8_t label = static_cast<std::uint8_t>(ds.labels[i]);
    write_bytes(os, &label, 1);
    write_bytes(os, ds.pixels.data() + i * ss, static_cast<std::size_t>(ss));
  }
}

Split split_dataset(const Dataset& ds, const SplitSpec& spec) {
  require(spec.val_fraction >= 0.0 && spec.val_fraction < 1.0,
          "validation fraction must be in [0, 1)");
  ds.validate();
  std::vector<std::size_t> perm(static_cast<std::size_t>(ds.n));
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  RngStream rng = RngStream(spec.seed).derive("validation-split");
  shuffle(perm, rng);
  const std::size_t val_count =
      static_cast<std::size_t>(std::floor(spec.val_fraction * static_cast<double>(ds.n)));
  Split out;
  out.val.assign(perm.begin(), perm.begin() + val_count);
  out.train.assign(perm.begin() + val_count, perm.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.train.begin(), out.train.end());
  return out;
}

std::vector<std::uint8_t> augment_image(std::span<const std::uint8_t> img, long channels,
                                        long height, long width, const AugmentConfig& cfg,
                                        RngStream& rng) {
  require(cfg.pad >= 0, "negative pad");
  require(static_cast<long>(img.size()) == channels * height * width,
          "augment: image size mismatch");
  std::vector<std::uint8_t> out(img.begin(), img.end());
  if (cfg.random_crop && cfg.pad > 0) {
    const long dy = static_cast<long>(rng.next_below(2 * cfg.pad + 1));
    const long dx = static_cast<long>(rng.next_below(2 * cfg.pad + 1));
    std::vector<std::uint8_t> cropped(out.size(), 0);
    for (long c = 0; c < channels; ++c) {
      for (long y = 0; y < height; ++y) {
        const long sy = y + dy - cfg.pad;  // source row in the unpadded image
        if (sy < 0 || sy >= height) continue;
        for (long x = 0; x < width; ++x) {
          const long sx = x + dx - cfg.pad;
          if (sx < 0 || sx >= width) continue;
          cropped[(c * height + y) * width + x] = out[(c * height + sy) * width + sx];
        }
      }
    }
    out = std::move(cropped);
  }
  if (cfg.horizontal_flip) {
    if (rng.next_below(2) == 1) {
      for (long c = 0; c < channels; ++c)
        for (long y = 0; y < height; ++y)
          for (long x = 0; x < width / 2; ++x)
            std::swap(out[(c * height + y) * width + x],
                      out[(c * height + y) * width + (width - 1 - x)]);
    }
  }
  return out;
}

Dataset synthesize(const SynthSpec& spec) {
  require(spec.classes > 1, "need at least two classes");
  require(spec.per_class > 0, "need samples per class");
  const long ss = spec.shape[0] * spec.shape[1] * spec.shape[2];
  require(ss > 0, "bad synthetic sample shape");

  RngStream base(spec.seed);
  RngStream center_rng = base.derive("centers");
  std::vector<std::vector<double>> centers(static_cast<std::size_t>(spec.classes));
  for (auto& c : centers) {
    c.resize(static_cast<std::size_t>(ss));
    for (auto& v : c) v = 60.0 + center_rng.next_double() * 135.0;
  }

  Dataset ds;
  ds.name = "synthetic";
  ds.n = static_cast<long>(spec.classes) * spec.per_class;
  ds.class_count = spec.classes;
  ds.labels.resize(ds.n);
  if (spec.as_real_vec) {
    ds.kind = Dataset::Kind::RealVec;
    ds.dim = ss;
    ds.reals.resize(static_cast<std::size_t>(ds.n) * ss);
  } else {
    ds.kind = Dataset::Kind::Images8;
    ds.channels = spec.shape[0];
    ds.height = spec.shape[1];
    ds.width = spec.shape[2];
    ds.pixels.resize(static_cast<std::size_t>(ds.n) * ss);
  }

  const long ambiguous = static_cast<long>(
      std::floor(spec.ambiguous_fraction * static_cast<double>(spec.per_class)));
  long row = 0;
  for (int cls = 0; cls < spec.classes; ++cls) {
    RngStream rng = base.derive("samples", static_cast<std::uint64_t>(cls), spec.salt);
    for (long k = 0; k < spec.per_class; ++k, ++row) {
      ds.labels[row] = cls;
      const bool blend = k < ambiguous;
      int other = cls;
      double lambda = 1.0;
      if (blend) {
        other = static_cast<int>((cls + 1 + rng.next_below(spec.classes - 1)) % spec.classes);
        lambda = 0.5 + 0.18 * rng.next_double();  // stays closer to its own class
      }
      for (long i = 0; i < ss; ++i) {
        const double mean = blend ? lambda * centers[cls][i] + (1.0 - lambda) * centers[other][i]
                                  : centers[cls][i];
        const double v = mean + spec.spread * rng.next_normal();
        if (spec.as_real_vec) {
          ds.reals[row * ss + i] = v / 255.0;
        } else {
          ds.pixels[row * ss + i] =
              static_cast<std::uint8_t>(std::clamp(std::lround(v), 0l, 255l));
        }
      }
    }
  }
  ds.validate();
  return ds;
}

}  // namespace prac
