// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "prac/data.hpp"

using namespace prac;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("prac_data_" + name);
}

void write_file(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
}

// Two 2x2 single-channel images plus labels, authored byte by byte.
const std::vector<std::uint8_t> kIdxImages = {
    0x00, 0x00, 0x08, 0x03,              // ubyte, rank 3
    0x00, 0x00, 0x00, 0x02,              // n = 2
    0x00, 0x00, 0x00, 0x02,              // h = 2
    0x00, 0x00, 0x00, 0x02,              // w = 2
    10,   20,   30,   40,                // image 0
    200,  150,  100,  50,                // image 1
};
const std::vector<std::uint8_t> kIdxLabels = {
    0x00, 0x00, 0x08, 0x01,  // ubyte, rank 1
    0x00, 0x00, 0x00, 0x02,  // n = 2
    1,    0,
};

}  // namespace

TEST_CASE("idx fixture parses with exact pixel values") {
  const auto imgs = temp_file("images.idx");
  const auto labs = temp_file("labels.idx");
  write_file(imgs, kIdxImages);
  write_file(labs, kIdxLabels);

  const Dataset ds = load_idx(imgs.string(), labs.string());
  CHECK(ds.n == 2);
  CHECK(ds.channels == 1);
  CHECK(ds.height == 2);
  CHECK(ds.width == 2);
  CHECK(ds.pixels == std::vector<std::uint8_t>{10, 20, 30, 40, 200, 150, 100, 50});
  CHECK(ds.labels == std::vector<int>{1, 0});

  fs::remove(imgs);
  fs::remove(labs);
}

TEST_CASE("idx rejects truncation and bad magic") {
  const auto imgs = temp_file("bad_images.idx");
  const auto labs = temp_file("bad_labels.idx");
  write_file(labs, kIdxLabels);

  auto truncated = kIdxImages;
  truncated.resize(truncated.size() - 2);
  write_file(imgs, truncated);
  CHECK_THROWS_AS(load_idx(imgs.string(), labs.string()), DataError);

  auto bad_magic = kIdxImages;
  bad_magic[2] = 0x0D;  // float type, unsupported
  write_file(imgs, bad_magic);
  CHECK_THROWS_AS(load_idx(imgs.string(), labs.string()), DataError);

  auto nonzero_prefix = kIdxImages;
  nonzero_prefix[0] = 1;
  write_file(imgs, nonzero_prefix);
  CHECK_THROWS_AS(load_idx(imgs.string(), labs.string()), DataError);

  fs::remove(imgs);
  fs::remove(labs);
}

TEST_CASE("idx save/load round-trips a synthetic set bit-exactly") {
  SynthSpec spec;
  spec.classes = 3;
  spec.per_class = 20;
  spec.shape = {1, 6, 6};
  const Dataset ds = synthesize(spec);
  const auto imgs = temp_file("rt_images.idx");
  const auto labs = temp_file("rt_labels.idx");
  save_idx(imgs.string(), labs.string(), ds);
  const Dataset back = load_idx(imgs.string(), labs.string());
  CHECK(back.pixels == ds.pixels);
  CHECK(back.labels == ds.labels);
  CHECK(back.class_count == ds.class_count);
  fs::remove(imgs);
  fs::remove(labs);
}

TEST_CASE("raw labeled binary round-trips and validates") {
  const auto path = temp_file("records.bin");
  // one record: label 2, 1x2x2 pixels
  write_file(path, {2, 9, 8, 7, 6});
  const Dataset ds = load_raw_labeled(path.string(), 1, 2, 2, 3);
  CHECK(ds.n == 1);
  CHECK(ds.labels == std::vector<int>{2});
  CHECK(ds.pixels == std::vector<std::uint8_t>{9, 8, 7, 6});

  save_raw_labeled(path.string(), ds);
  const Dataset again = load_raw_labeled(path.string(), 1, 2, 2, 3);
  CHECK(again.pixels == ds.pixels);
  CHECK(again.labels == ds.labels);

  // length not a record multiple
  write_file(path, {2, 9, 8, 7, 6, 1});
  CHECK_THROWS_AS(load_raw_labeled(path.string(), 1, 2, 2, 3), DataError);
  // label out of range
  write_file(path, {3, 9, 8, 7, 6});
  CHECK_THROWS_AS(load_raw_labeled(path.string(), 1, 2, 2, 3), DataError);
  fs::remove(path);
}

TEST_CASE("validation split partitions the index range deterministically") {
  SynthSpec spec;
  spec.classes = 2;
  spec.per_class = 50;
  spec.shape = {1, 4, 4};
  const Dataset ds = synthesize(spec);

  SplitSpec ss;
  ss.val_fraction = 0.10;
  ss.seed = 5;
  const Split a = split_dataset(ds, ss);
  const Split b = split_dataset(ds, ss);
  CHECK(a.train == b.train);
  CHECK(a.val == b.val);
  CHECK(a.train.size() == 90);
  CHECK(a.val.size() == 10);

  std::set<std::size_t> all(a.train.begin(), a.train.end());
  all.insert(a.val.begin(), a.val.end());
  CHECK(all.size() == 100);
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == 99);

  SplitSpec other = ss;
  other.seed = 6;
  CHECK(split_dataset(ds, other).val != a.val);

  SplitSpec none = ss;
  none.val_fraction = 0.0;
  CHECK(split_dataset(ds, none).val.empty());
}

TEST_CASE("augmentation with pad zero and no flip is the identity") {
  std::vector<std::uint8_t> img{1, 2, 3, 4};
  AugmentConfig cfg;
  cfg.pad = 0;
  cfg.random_crop = true;
  cfg.horizontal_flip = false;
  RngStream rng(1);
  CHECK(augment_image(img, 1, 2, 2, cfg, rng) == img);
}

TEST_CASE("flipping twice restores the image") {
  std::vector<std::uint8_t> img{1, 2, 3, 4, 5, 6};
  AugmentConfig cfg;
  cfg.pad = 0;
  cfg.random_crop = false;
  cfg.horizontal_flip = true;
  // find a seed whose first draw forces a flip, then reuse a fresh stream of
  // the same seed so the second call flips again
  std::uint64_t seed = 0;
  while (RngStream(seed).next_below(2) != 1) ++seed;
  RngStream r1(seed), r2(seed);
  const auto once = augment_image(img, 1, 2, 3, cfg, r1);
  CHECK(once == std::vector<std::uint8_t>{3, 2, 1, 6, 5, 4});
  const auto twice = augment_image(once, 1, 2, 3, cfg, r2);
  CHECK(twice == img);
}

TEST_CASE("crop offsets cover the whole padded range uniformly") {
  AugmentConfig cfg;
  cfg.pad = 2;
  cfg.random_crop = true;
  cfg.horizontal_flip = false;
  // a one-pixel image marks which offset was drawn: the pixel lands at the
  // center only for (dy, dx) = (pad, pad)
  std::vector<std::uint8_t> img{255};
  RngStream rng(77);
  std::array<int, 25> counts{};
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    // reproduce the offsets by consuming the same stream the augmenter uses
    RngStream probe = rng;
    const int dy = static_cast<int>(probe.next_below(5));
    const int dx = static_cast<int>(probe.next_below(5));
    const auto out = augment_image(img, 1, 1, 1, cfg, rng);
    const bool visible = out[0] == 255;
    CHECK(visible == (dy == 2 && dx == 2));
    counts[static_cast<std::size_t>(dy * 5 + dx)]++;
  }
  for (int c : counts) {
    CHECK(c > draws / 25 - 320);
    CHECK(c < draws / 25 + 320);
  }
}

TEST_CASE("augmentation keeps shape and leaves the label alone") {
  SynthSpec spec;
  spec.classes = 2;
  spec.per_class = 4;
  spec.shape = {2, 5, 5};
  const Dataset ds = synthesize(spec);
  AugmentConfig cfg;
  cfg.pad = 2;
  cfg.random_crop = true;
  cfg.horizontal_flip = true;
  RngStream rng(3);
  for (long i = 0; i < ds.n; ++i) {
    std::span<const std::uint8_t> img(ds.pixels.data() + i * ds.sample_size(),
                                      static_cast<std::size_t>(ds.sample_size()));
    const auto out = augment_image(img, ds.channels, ds.height, ds.width, cfg, rng);
    CHECK(static_cast<long>(out.size()) == ds.sample_size());
  }
}

TEST_CASE("synthesis is deterministic with exact per-class counts") {
  SynthSpec spec;
  spec.classes = 4;
  spec.per_class = 30;
  spec.shape = {1, 5, 5};
  spec.seed = 9;
  const Dataset a = synthesize(spec);
  const Dataset b = synthesize(spec);
  CHECK(a.pixels == b.pixels);
  CHECK(a.labels == b.labels);
  std::vector<int> counts(4, 0);
  for (int l : a.labels) counts[static_cast<std::size_t>(l)]++;
  for (int c : counts) CHECK(c == 30);

  // a different salt draws different samples around the same centers
  SynthSpec test_spec = spec;
  test_spec.salt = 1;
  const Dataset t = synthesize(test_spec);
  CHECK(t.pixels != a.pixels);
}

TEST_CASE("batch assembly normalizes and respects sample shape") {
  SynthSpec spec;
  spec.classes = 2;
  spec.per_class = 3;
  spec.shape = {1, 2, 2};
  const Dataset ds = synthesize(spec);
  AugmentConfig cfg;
  cfg.mean = {0.5};
  cfg.stddev = {0.5};
  const std::vector<std::size_t> ids{0, 4};
  const Tensor<double> batch = assemble_batch<double>(ds, ids, cfg, nullptr);
  CHECK(batch.shape == Shape{2, 1, 2, 2});
  for (Index i = 0; i < 4; ++i) {
    const double expect = (static_cast<double>(ds.pixels[static_cast<std::size_t>(i)]) / 255.0 - 0.5) / 0.5;
    CHECK(batch[i] == doctest::Approx(expect).epsilon(1e-12));
  }
  const auto labels = gather_labels(ds, ids);
  CHECK(labels == std::vector<int>{ds.labels[0], ds.labels[4]});
}

TEST_CASE("real-vector synthesis feeds the mlp path") {
  SynthSpec spec;
  spec.classes = 2;
  spec.per_class = 5;
  spec.shape = {1, 3, 3};
  spec.as_real_vec = true;
  const Dataset ds = synthesize(spec);
  CHECK(ds.kind == Dataset::Kind::RealVec);
  CHECK(ds.dim == 9);
  const std::vector<std::size_t> ids{0, 1, 9};
  const Tensor<double> batch = assemble_batch<double>(ds, ids, AugmentConfig{}, nullptr);
  CHECK(batch.shape == Shape{3, 9});
  CHECK(batch[0] == ds.reals[0]);
}
