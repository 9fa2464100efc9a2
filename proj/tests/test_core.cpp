// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <set>

#include "prac/layers.hpp"
#include "prac/network.hpp"
#include "prac/optimizer.hpp"
#include "prac/params.hpp"
#include "prac/rng.hpp"
#include "prac/schedule.hpp"
#include "prac/tensor.hpp"

using namespace prac;

namespace {

// Loss as a function of the parameters only, for finite differences.
double loss_of(const NetworkSpec& net, const ParameterSet<double>& params,
               const SparseMask* mask, const Tensor<double>& batch,
               const std::vector<int>& labels) {
  const Tensor<double> logits = forward(net, params, mask, batch);
  return softmax_cross_entropy(logits, std::span<const int>(labels));
}

// Central finite differences against the analytic gradient over every
// parameter; returns the worst relative error.
double max_gradient_error(const NetworkSpec& net, ParameterSet<double> params,
                          const SparseMask* mask, const Tensor<double>& batch,
                          const std::vector<int>& labels) {
  const double eps = 1e-5;
  const BackwardOut<double> back =
      backward(net, params, mask, batch, std::span<const int>(labels));
  double worst = 0.0;
  for (std::size_t k = 0; k < params.entries.size(); ++k) {
    auto& w = params.entries[k].tensor;
    const auto& g = back.grads.entries[k].tensor;
    for (Index i = 0; i < w.size(); ++i) {
      const double keep = w[i];
      w[i] = keep + eps;
      const double hi = loss_of(net, params, mask, batch, labels);
      w[i] = keep - eps;
      const double lo = loss_of(net, params, mask, batch, labels);
      w[i] = keep;
      const double fd = (hi - lo) / (2.0 * eps);
      const double denom = std::max({std::abs(fd), std::abs(g[i]), 1e-6});
      worst = std::max(worst, std::abs(fd - g[i]) / denom);
    }
  }
  return worst;
}

Tensor<double> random_batch(const Shape& sample_shape, Index batch, RngStream& rng) {
  Shape s;
  s.push_back(batch);
  for (Index d : sample_shape) s.push_back(d);
  Tensor<double> t(s);
  for (Index i = 0; i < t.size(); ++i) t[i] = rng.next_uniform(-1.0, 1.0);
  return t;
}

std::vector<int> random_labels(Index batch, int classes, RngStream& rng) {
  std::vector<int> out(static_cast<std::size_t>(batch));
  for (auto& v : out) v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(classes)));
  return out;
}

}  // namespace

TEST_CASE("rng streams are reproducible and derivation is order-free") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.counter() == 100);

  RngStream parent(7);
  parent.next_u64();  // consuming the parent must not move child streams
  RngStream c1 = parent.derive("child", 1);
  RngStream c2 = RngStream(7).derive("child", 1);
  CHECK(c1.next_u64() == c2.next_u64());
  CHECK(RngStream(7).derive("child", 1).next_u64() !=
        RngStream(7).derive("child", 2).next_u64());
  CHECK(RngStream(7).derive("x").next_u64() != RngStream(7).derive("y").next_u64());
}

TEST_CASE("rng bounded draws and doubles stay in range") {
  RngStream rng(11);
  for (int i = 0; i < 2000; ++i) {
    CHECK(rng.next_below(7) < 7);
    const double d = rng.next_double();
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
  }
  CHECK(rng.next_below(1) == 0);
}

TEST_CASE("shuffle is a permutation and is seed-stable") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  RngStream r1(3), r2(3);
  shuffle(v, r1);
  shuffle(w, r2);
  CHECK(v == w);
  std::set<int> seen(v.begin(), v.end());
  CHECK(seen.size() == 50);
}

TEST_CASE("normal draws have sane moments") {
  RngStream rng(5);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.next_normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("tensor shape and finite checks") {
  Tensor<double> t({2, 3});
  CHECK(t.size() == 6);
  CHECK(t.all_finite());
  t[0] = std::nan("");
  CHECK(!t.all_finite());
  CHECK_THROWS_AS(Tensor<double>({0, 3}), InputError);
  CHECK_THROWS_AS((Tensor<double>({2, 2}, {1.0, 2.0, 3.0})), InputError);
}

TEST_CASE("network spec validates layer compatibility") {
  CHECK_NOTHROW(make_mlp({1, 12, 12}, 10));
  CHECK_NOTHROW(make_cnn({1, 12, 12}, 10));
  // mismatched fc width
  CHECK_THROWS_AS(NetworkSpec({LayerDesc::fully_connected(5, 3)}, 3, Shape{4}), InputError);
  // final width must equal the class count
  CHECK_THROWS_AS(NetworkSpec({LayerDesc::fully_connected(4, 3)}, 2, Shape{4}), InputError);
  // conv on flat input
  CHECK_THROWS_AS(NetworkSpec({LayerDesc::conv2d(1, 2, 3)}, 2, Shape{4}), InputError);

  const NetworkSpec cnn = make_cnn({1, 12, 12}, 10);
  CHECK(cnn.io_shapes.back() == Shape{10});
}

TEST_CASE("parameter init is deterministic, ordered, fan-in bounded") {
  const NetworkSpec net = make_mlp({1, 4, 4}, 3);
  const auto p1 = init_parameters<double>(net, RngStream(9));
  const auto p2 = init_parameters<double>(net, RngStream(9));
  REQUIRE(p1.entries.size() == p2.entries.size());
  for (std::size_t k = 0; k < p1.entries.size(); ++k) {
    CHECK(p1.entries[k].name == p2.entries[k].name);
    CHECK(p1.entries[k].tensor.values == p2.entries[k].tensor.values);
  }
  // order: weight then bias per layer, ascending layer index
  CHECK(p1.entries[0].name == "1.weight");
  CHECK(p1.entries[1].name == "1.bias");
  CHECK(p1.entries[0].prunable);
  CHECK(!p1.entries[1].prunable);
  // biases zero, weights within the fan-in bound
  const double bound = std::sqrt(6.0 / 16.0);
  for (Index i = 0; i < p1.entries[0].tensor.size(); ++i)
    CHECK(std::abs(p1.entries[0].tensor[i]) <= bound);
  for (Index i = 0; i < p1.entries[1].tensor.size(); ++i)
    CHECK(p1.entries[1].tensor[i] == 0.0);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  const NetworkSpec net = make_mlp({6}, 2);
  const auto params = init_parameters<double>(net, RngStream(123));
  const auto path = std::filesystem::temp_directory_path() / "prac_ckpt_test.bin";
  save_checkpoint(path.string(), params);
  const auto loaded = load_checkpoint<double>(path.string());
  REQUIRE(loaded.entries.size() == params.entries.size());
  for (std::size_t k = 0; k < params.entries.size(); ++k) {
    CHECK(loaded.entries[k].name == params.entries[k].name);
    CHECK(loaded.entries[k].prunable == params.entries[k].prunable);
    CHECK(loaded.entries[k].tensor.values == params.entries[k].tensor.values);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_checkpoint<double>(path.string()), DataError);
}

TEST_CASE("two-layer fully-connected forward matches hand evaluation") {
  std::vector<LayerDesc> layers{LayerDesc::fully_connected(2, 2),
                                LayerDesc::fully_connected(2, 2)};
  const NetworkSpec net(layers, 2, Shape{2});
  ParameterSet<double> p = zero_parameters<double>(net);
  p.find("0.weight")->tensor = Tensor<double>({2, 2}, {0.5, -1.0, 0.25, 0.75});
  p.find("0.bias")->tensor = Tensor<double>({2}, {0.1, -0.2});
  p.find("1.weight")->tensor = Tensor<double>({2, 2}, {1.0, 0.5, -0.5, 2.0});
  p.find("1.bias")->tensor = Tensor<double>({2}, {0.0, 1.0});

  Tensor<double> x({1, 2}, {1.0, 2.0});
  const Tensor<double> logits = forward(net, p, nullptr, x);
  // h = [1*0.5 + 2*0.25 + 0.1, 1*(-1) + 2*0.75 - 0.2] = [1.1, 0.3]
  // y = [1.1*1 + 0.3*(-0.5), 1.1*0.5 + 0.3*2 + 1] = [0.95, 2.15]
  CHECK(logits[0] == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(logits[1] == doctest::Approx(2.15).epsilon(1e-12));
}

TEST_CASE("identity mask forward equals unmasked forward") {
  const NetworkSpec net = make_cnn({1, 8, 8}, 4);
  const auto params = init_parameters<double>(net, RngStream(21));
  RngStream rng(22);
  const Tensor<double> batch = random_batch(net.input_shape(), 3, rng);
  const SparseMask ones = dense_mask(params);
  const Tensor<double> a = forward(net, params, nullptr, batch);
  const Tensor<double> b = forward(net, params, &ones, batch);
  CHECK(a.values == b.values);
}

TEST_CASE("all-zero mask with zero biases gives constant logits") {
  const NetworkSpec net = make_mlp({5}, 3);
  const auto params = init_parameters<double>(net, RngStream(31));  // biases zero
  SparseMask zeros = dense_mask(params);
  for (auto& e : zeros.entries) std::fill(e.bits.begin(), e.bits.end(), 0);
  RngStream rng(32);
  const Tensor<double> batch = random_batch(net.input_shape(), 4, rng);
  const Tensor<double> logits = forward(net, params, &zeros, batch);
  for (Index i = 0; i < logits.size(); ++i) CHECK(logits[i] == 0.0);
}

TEST_CASE("uniform logits loss equals ln(classes)") {
  Tensor<double> logits({4, 7});
  const std::vector<int> labels{0, 1, 2, 6};
  const double loss = softmax_cross_entropy(logits, std::span<const int>(labels));
  CHECK(loss == doctest::Approx(std::log(7.0)).epsilon(1e-12));
}

TEST_CASE("labels out of range are rejected") {
  const NetworkSpec net = make_mlp({5}, 3);
  const auto params = init_parameters<double>(net, RngStream(41));
  RngStream rng(42);
  const Tensor<double> batch = random_batch(net.input_shape(), 2, rng);
  const std::vector<int> bad{0, 3};
  CHECK_THROWS_AS(backward(net, params, nullptr, batch, std::span<const int>(bad)),
                  InputError);
}

TEST_CASE("gradients at masked positions are exactly zero") {
  const NetworkSpec net = make_mlp({5}, 3);
  const auto params = init_parameters<double>(net, RngStream(51));
  SparseMask mask = dense_mask(params);
  mask.entries[0].bits[3] = 0;
  mask.entries[0].bits[7] = 0;
  RngStream rng(52);
  const Tensor<double> batch = random_batch(net.input_shape(), 4, rng);
  const std::vector<int> labels = random_labels(4, 3, rng);
  const auto back = backward(net, params, &mask, batch, std::span<const int>(labels));
  const auto& g = back.grads.entries[0].tensor;
  CHECK(g[3] == 0.0);
  CHECK(g[7] == 0.0);
  // and an unmasked position is generically nonzero
  CHECK(g[0] != 0.0);
}

TEST_CASE("analytic gradients match central differences on every layer type") {
  RngStream rng(61);

  SUBCASE("fully-connected stack with relu") {
    std::vector<LayerDesc> layers{LayerDesc::fully_connected(4, 5), LayerDesc::relu(),
                                  LayerDesc::fully_connected(5, 3)};
    const NetworkSpec net(layers, 3, Shape{4});
    const auto params = init_parameters<double>(net, RngStream(62));
    const Tensor<double> batch = random_batch(net.input_shape(), 3, rng);
    const std::vector<int> labels = random_labels(3, 3, rng);
    CHECK(max_gradient_error(net, params, nullptr, batch, labels) <= 1e-4);
  }

  SUBCASE("conv, pool, flatten head") {
    std::vector<LayerDesc> layers{LayerDesc::conv2d(1, 2, 3, 1, 1), LayerDesc::relu(),
                                  LayerDesc::max_pool2d(2, 2), LayerDesc::flatten(),
                                  LayerDesc::fully_connected(8, 3)};
    const NetworkSpec net(layers, 3, Shape{1, 4, 4});
    const auto params = init_parameters<double>(net, RngStream(63));
    const Tensor<double> batch = random_batch(net.input_shape(), 2, rng);
    const std::vector<int> labels = random_labels(2, 3, rng);
    CHECK(max_gradient_error(net, params, nullptr, batch, labels) <= 1e-4);
  }

  SUBCASE("two conv blocks, strided conv, masked weights") {
    std::vector<LayerDesc> layers{LayerDesc::conv2d(2, 3, 3, 1, 1), LayerDesc::relu(),
                                  LayerDesc::max_pool2d(2, 2),
                                  LayerDesc::conv2d(3, 4, 3, 2, 1), LayerDesc::relu(),
                                  LayerDesc::flatten(), LayerDesc::fully_connected(16, 3)};
    const NetworkSpec net(layers, 3, Shape{2, 6, 6});
    const auto params = init_parameters<double>(net, RngStream(64));
    SparseMask mask = dense_mask(params);
    RngStream mask_rng(65);
    for (auto& e : mask.entries)
      for (auto& b : e.bits)
        if (mask_rng.next_double() < 0.3) b = 0;
    const Tensor<double> batch = random_batch(net.input_shape(), 2, rng);
    const std::vector<int> labels = random_labels(2, 3, rng);
    CHECK(max_gradient_error(net, params, &mask, batch, labels) <= 1e-4);
  }
}

TEST_CASE("argmax ties break to the lowest class index") {
  Tensor<double> logits({2, 3}, {1.0, 1.0, 0.5, 0.2, 0.9, 0.9});
  const auto pred = argmax_rows(logits);
  CHECK(pred[0] == 0);
  CHECK(pred[1] == 1);
}

TEST_CASE("sgd step: plain gradient step") {
  NetworkSpec net({LayerDesc::fully_connected(1, 1, false)}, 1, Shape{1});
  ParameterSet<double> p = zero_parameters<double>(net);
  p.entries[0].tensor[0] = 1.0;
  ParameterSet<double> g = ParameterSet<double>::zeros_like(p);
  g.entries[0].tensor[0] = 0.25;
  auto opt = OptimizerState<double>::zeros_like(p, 0.0, 0.0);
  sgd_step(p, g, opt, 1.0);
  CHECK(p.entries[0].tensor[0] == 0.75);
}

TEST_CASE("sgd step: momentum recurrence over two steps") {
  NetworkSpec net({LayerDesc::fully_connected(1, 1, false)}, 1, Shape{1});
  ParameterSet<double> p = zero_parameters<double>(net);
  p.entries[0].tensor[0] = 1.0;
  ParameterSet<double> g = ParameterSet<double>::zeros_like(p);
  g.entries[0].tensor[0] = 1.0;
  auto opt = OptimizerState<double>::zeros_like(p, 0.9, 0.0);
  sgd_step(p, g, opt, 0.1);  // v1 = 1,   w = 0.9
  sgd_step(p, g, opt, 0.1);  // v2 = 1.9, w = 0.71
  CHECK(p.entries[0].tensor[0] == doctest::Approx(0.71).epsilon(1e-12));
}

TEST_CASE("sgd step: weight decay enters the velocity") {
  NetworkSpec net({LayerDesc::fully_connected(1, 1, false)}, 1, Shape{1});
  ParameterSet<double> p = zero_parameters<double>(net);
  p.entries[0].tensor[0] = 2.0;
  ParameterSet<double> g = ParameterSet<double>::zeros_like(p);  // zero gradient
  auto opt = OptimizerState<double>::zeros_like(p, 0.0, 0.5);
  sgd_step(p, g, opt, 1.0);  // v = 0.5*2 = 1; w = 2 - 1 = 1
  CHECK(p.entries[0].tensor[0] == 1.0);
}

TEST_CASE("sgd step: masked weights stay exactly zero") {
  NetworkSpec net({LayerDesc::fully_connected(2, 1, false)}, 1, Shape{2});
  ParameterSet<double> p = zero_parameters<double>(net);
  p.entries[0].tensor = Tensor<double>({2, 1}, {0.0, 1.0});
  SparseMask mask = dense_mask(p);
  mask.entries[0].bits[0] = 0;
  ParameterSet<double> g = ParameterSet<double>::zeros_like(p);
  g.entries[0].tensor = Tensor<double>({2, 1}, {5.0, 0.5});
  auto opt = OptimizerState<double>::zeros_like(p);
  sgd_step(p, g, opt, 0.1, &mask);
  CHECK(p.entries[0].tensor[0] == 0.0);
  CHECK(opt.momentum_buffers.entries[0].tensor[0] == 0.0);
  CHECK(p.entries[0].tensor[1] != 1.0);
}

TEST_CASE("non-finite updates raise a numeric error") {
  NetworkSpec net({LayerDesc::fully_connected(1, 1, false)}, 1, Shape{1});
  ParameterSet<double> p = zero_parameters<double>(net);
  p.entries[0].tensor[0] = 1.0;
  ParameterSet<double> g = ParameterSet<double>::zeros_like(p);
  g.entries[0].tensor[0] = std::numeric_limits<double>::infinity();
  auto opt = OptimizerState<double>::zeros_like(p);
  CHECK_THROWS_AS(sgd_step(p, g, opt, 0.1), NumericError);
}

TEST_CASE("multi-step schedule decays at the milestones") {
  // epochs of 352 iterations; decay at epochs 91 and 136
  const long ipe = 352;
  LrSchedule s;
  s.base_lr = 0.1;
  s.milestones = {91 * ipe, 136 * ipe};
  s.total_iterations = 182 * ipe;
  validate_schedule(s);
  CHECK(lr_at(s, 0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(lr_at(s, 100 * ipe + 5) == doctest::Approx(0.01).epsilon(1e-12));   // inside epoch 100
  CHECK(lr_at(s, 150 * ipe) == doctest::Approx(0.001).epsilon(1e-12));
  CHECK_THROWS_AS(lr_at(s, -1), InputError);
  CHECK_THROWS_AS(lr_at(s, s.total_iterations), InputError);
}

TEST_CASE("warmup ramps linearly from zero") {
  LrSchedule s;
  s.base_lr = 0.03;
  s.warmup_iterations = 30;
  s.total_iterations = 200;
  validate_schedule(s);
  // halfway through warmup: (14+1)/30 of the base rate
  CHECK(lr_at(s, 14) == doctest::Approx(0.015).epsilon(1e-12));
  CHECK(lr_at(s, 29) == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(lr_at(s, 30) == doctest::Approx(0.03).epsilon(1e-12));
}

TEST_CASE("schedule rescaling floors milestones and keeps ordering") {
  LrSchedule s;
  s.base_lr = 0.1;
  s.milestones = {9100, 13600};
  s.total_iterations = 18200;
  SUBCASE("ratio one leaves the schedule unchanged") {
    const LrSchedule r = rescale_schedule(s, 1.0);
    CHECK(r.milestones == s.milestones);
    CHECK(r.total_iterations == s.total_iterations);
  }
  SUBCASE("ratio 0.4 scales and floors") {
    const LrSchedule r = rescale_schedule(s, 0.4);
    CHECK(r.milestones == std::vector<long>{3640, 5440});
    CHECK(r.total_iterations == 7280);
  }
  SUBCASE("collapsing milestones clamp above the warmup with strict increase") {
    LrSchedule w = s;
    w.base_lr = 0.03;
    w.warmup_iterations = 3000;
    const LrSchedule r = rescale_schedule(w, 1e-4);
    CHECK(r.warmup_iterations == 1);
    CHECK(r.milestones.size() == 2);
    CHECK(r.milestones[0] > r.warmup_iterations);
    CHECK(r.milestones[1] > r.milestones[0]);
    CHECK(r.total_iterations > r.milestones[1]);
  }
}

TEST_CASE("schedule validation rejects bad shapes") {
  LrSchedule s;
  s.milestones = {50, 40};
  s.total_iterations = 100;
  CHECK_THROWS_AS(validate_schedule(s), InputError);
  s.milestones = {50, 120};
  CHECK_THROWS_AS(validate_schedule(s), InputError);
  s.milestones = {50};
  s.warmup_iterations = 60;
  CHECK_THROWS_AS(validate_schedule(s), InputError);
}

TEST_CASE("float instantiation of the math stack compiles and runs") {
  const NetworkSpec net = make_mlp({6}, 3);
  const auto params = init_parameters<float>(net, RngStream(71));
  RngStream rng(72);
  Tensor<float> batch({2, 6});
  for (Index i = 0; i < batch.size(); ++i)
    batch[i] = static_cast<float>(rng.next_uniform(-1.0, 1.0));
  const std::vector<int> labels{0, 2};
  const auto back = backward(net, params, nullptr, batch, std::span<const int>(labels));
  CHECK(std::isfinite(back.loss));
}
