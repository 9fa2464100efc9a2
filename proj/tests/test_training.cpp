// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "prac/baselines.hpp"
#include "prac/data.hpp"
#include "prac/ticket.hpp"
#include "prac/train.hpp"

using namespace prac;

namespace {

struct Task {
  Dataset train;
  Dataset test;
  Split split;
  NetworkSpec net;
};

// Small image-shaped Gaussian task; mlp unless stated otherwise.
Task make_task(int classes = 4, long per_class = 60, const std::string& arch = "mlp") {
  SynthSpec spec;
  spec.classes = classes;
  spec.per_class = per_class;
  spec.shape = {1, 6, 6};
  spec.spread = 30.0;
  spec.ambiguous_fraction = 0.15;
  spec.seed = 2024;
  Task t;
  t.train = synthesize(spec);
  SynthSpec test_spec = spec;
  test_spec.per_class = per_class / 3;
  test_spec.salt = 1;
  t.test = synthesize(test_spec);
  SplitSpec ss;
  ss.val_fraction = 0.10;
  ss.seed = 12;
  t.split = split_dataset(t.train, ss);
  t.net = make_network(arch, t.train.sample_shape(), classes);
  return t;
}

TicketRunConfig small_config(std::uint64_t seed) {
  TicketRunConfig cfg;
  cfg.target_sparsity = 0.45;  // three rounds at ratio 0.2
  cfg.epochs_per_round = 4;
  cfg.batch_size = 64;
  cfg.rewind_epoch = 1;
  cfg.milestone_epochs = {2, 3};
  cfg.augment_cfg.mean = {0.5};
  cfg.augment_cfg.stddev = {0.5};
  cfg.seed = seed;
  return cfg;
}

TrainConfig train_config(const Task& t, int epochs, std::uint64_t seed) {
  TrainConfig tc;
  tc.batch_size = 64;
  const long ipe = iterations_per_epoch(t.split.train.size(), tc.batch_size);
  tc.iteration_budget = ipe * epochs;
  const std::vector<long> milestones =
      epochs >= 4 ? std::vector<long>{epochs / 2} : std::vector<long>{};
  tc.schedule = make_schedule(LrVariant::Standard, ipe, epochs, milestones);
  tc.augment_cfg.mean = {0.5};
  tc.augment_cfg.stddev = {0.5};
  tc.seed = seed;
  return tc;
}

bool params_equal(const ParameterSet<double>& a, const ParameterSet<double>& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (std::size_t k = 0; k < a.entries.size(); ++k)
    if (a.entries[k].tensor.values != b.entries[k].tensor.values) return false;
  return true;
}

}  // namespace

TEST_CASE("a zero budget leaves the parameters bitwise untouched") {
  const Task t = make_task();
  auto params = init_parameters<double>(t.net, RngStream(1));
  const auto before = params;
  auto opt = OptimizerState<double>::zeros_like(params);
  TrainConfig tc = train_config(t, 1, 3);
  tc.iteration_budget = 0;
  const auto result =
      train_on_subset(t.net, params, opt, nullptr, t.train, t.split.train, t.split.val, tc);
  CHECK(result.iterations == 0);
  CHECK(result.epochs.empty());
  CHECK(params_equal(params, before));
}

TEST_CASE("training is bitwise deterministic for a fixed seed") {
  const Task t = make_task();
  auto run = [&](std::uint64_t seed) {
    auto params = init_parameters<double>(t.net, RngStream(5));
    auto opt = OptimizerState<double>::zeros_like(params);
    const TrainConfig tc = train_config(t, 2, seed);
    train_on_subset(t.net, params, opt, nullptr, t.train, t.split.train, t.split.val, tc);
    return params;
  };
  CHECK(params_equal(run(42), run(42)));
  CHECK(!params_equal(run(42), run(43)));
}

TEST_CASE("training with an all-ones mask is bitwise identical to no mask") {
  const Task t = make_task();
  auto run = [&](bool with_mask) {
    auto params = init_parameters<double>(t.net, RngStream(6));
    const SparseMask ones = dense_mask(params);
    auto opt = OptimizerState<double>::zeros_like(params);
    const TrainConfig tc = train_config(t, 2, 9);
    train_on_subset(t.net, params, opt, with_mask ? &ones : nullptr, t.train, t.split.train,
                    t.split.val, tc);
    return params;
  };
  CHECK(params_equal(run(true), run(false)));
}

TEST_CASE("masked weights stay exactly zero through training") {
  const Task t = make_task();
  auto params = init_parameters<double>(t.net, RngStream(7));
  SparseMask mask = dense_mask(params);
  RngStream mask_rng(8);
  for (auto& e : mask.entries)
    for (auto& b : e.bits)
      if (mask_rng.next_double() < 0.4) b = 0;
  params = apply_mask(params, mask);
  auto opt = OptimizerState<double>::zeros_like(params);
  TrainConfig tc = train_config(t, 2, 10);
  TrainHooks<double> hooks;
  hooks.on_epoch_end = [&](int, const ParameterSet<double>& p, double) {
    CHECK(detail::masked_weight_max_abs(p, mask) == 0.0);
    return true;
  };
  train_on_subset(t.net, params, opt, &mask, t.train, t.split.train, t.split.val, tc, &hooks);
  CHECK(detail::masked_weight_max_abs(params, mask) == 0.0);
}

TEST_CASE("a separable task trains to high accuracy") {
  SynthSpec spec;
  spec.classes = 2;
  spec.per_class = 120;
  spec.shape = {1, 5, 5};
  spec.spread = 6.0;             // tight clusters
  spec.ambiguous_fraction = 0.0; // fully separable
  spec.seed = 77;
  const Dataset ds = synthesize(spec);
  SplitSpec ss;
  ss.seed = 3;
  const Split split = split_dataset(ds, ss);
  const NetworkSpec net = make_mlp(ds.sample_shape(), 2);
  auto params = init_parameters<double>(net, RngStream(11));
  auto opt = OptimizerState<double>::zeros_like(params);
  TrainConfig tc;
  tc.batch_size = 32;
  const long ipe = iterations_per_epoch(split.train.size(), tc.batch_size);
  tc.iteration_budget = ipe * 10;
  tc.schedule = make_schedule(LrVariant::Standard, ipe, 10, {6, 8});
  tc.augment_cfg.mean = {0.5};
  tc.augment_cfg.stddev = {0.5};
  tc.seed = 21;
  train_on_subset(net, params, opt, nullptr, ds, split.train, split.val, tc);
  const double acc =
      evaluate_accuracy(net, params, nullptr, ds, split.train, tc.augment_cfg);
  CHECK(acc >= 0.95);
}

TEST_CASE("per-epoch validation accuracy and iteration counts are recorded") {
  const Task t = make_task();
  auto params = init_parameters<double>(t.net, RngStream(13));
  auto opt = OptimizerState<double>::zeros_like(params);
  const TrainConfig tc = train_config(t, 3, 17);
  const auto result =
      train_on_subset(t.net, params, opt, nullptr, t.train, t.split.train, t.split.val, tc);
  const long ipe = iterations_per_epoch(t.split.train.size(), tc.batch_size);
  REQUIRE(result.epochs.size() == 3);
  for (const auto& rec : result.epochs) {
    CHECK(rec.iterations == ipe);
    CHECK(rec.val_accuracy >= 0.0);
    CHECK(rec.val_accuracy <= 1.0);
  }
  CHECK(result.iterations == 3 * ipe);
}

TEST_CASE("dynamic iteration budget follows the scaling formula") {
  CHECK(dynamic_iteration_budget(45000, 45000, 1000) == 1000);
  CHECK(dynamic_iteration_budget(18000, 45000, 1000) == 400);
  CHECK(dynamic_iteration_budget(1, 1000000, 10) == 1);  // clamped to one
  CHECK(dynamic_iteration_budget(9000, 9000, 288) == 288);
  CHECK_THROWS_AS(dynamic_iteration_budget(0, 10, 100), InputError);
  CHECK_THROWS_AS(dynamic_iteration_budget(11, 10, 100), InputError);
}

TEST_CASE("early stop monitor: the reference distance sequence") {
  EarlyStopConfig cfg;
  cfg.threshold = 0.07;
  cfg.patience = 1;
  EarlyStopMonitor monitor(cfg);
  CHECK(!monitor.observe(0.2));
  CHECK(!monitor.observe(0.15));
  CHECK(monitor.observe(0.06));  // halts exactly after the third comparison
}

TEST_CASE("early stop monitor: zero threshold never stops") {
  EarlyStopConfig cfg;
  cfg.threshold = 0.0;
  EarlyStopMonitor monitor(cfg);
  for (int i = 0; i < 100; ++i) CHECK(!monitor.observe(0.0));
}

TEST_CASE("early stop monitor: identical masks stop under any positive threshold") {
  SparseMask a = ones_mask({{"0.weight", 16}});
  EarlyStopConfig cfg;
  cfg.threshold = 1e-9;
  EarlyStopMonitor monitor(cfg);
  CHECK(early_stop_check(a, a, cfg.threshold, monitor) == EarlyStopDecision::Stop);
}

TEST_CASE("early stop monitor: patience requires consecutive quiet pairs") {
  EarlyStopConfig cfg;
  cfg.threshold = 0.1;
  cfg.patience = 2;
  EarlyStopMonitor monitor(cfg);
  CHECK(!monitor.observe(0.05));
  CHECK(!monitor.observe(0.2));   // resets the streak
  CHECK(!monitor.observe(0.05));
  CHECK(monitor.observe(0.04));
}

TEST_CASE("rewind equals an elementwise select of the snapshot") {
  const NetworkSpec net = make_mlp({10}, 3);
  const auto snapshot = init_parameters<double>(net, RngStream(31));
  SparseMask mask = dense_mask(snapshot);
  RngStream rng(32);
  for (auto& e : mask.entries)
    for (auto& b : e.bits) b = rng.next_below(2);
  const auto rewound = rewind(snapshot, mask);
  for (std::size_t k = 0; k < rewound.entries.size(); ++k) {
    const auto& r = rewound.entries[k].tensor;
    const auto& s = snapshot.entries[k].tensor;
    if (!rewound.entries[k].prunable) {
      CHECK(r.values == s.values);
      continue;
    }
    const auto* bits = &mask.find(rewound.entries[k].name)->bits;
    for (Index i = 0; i < r.size(); ++i) {
      const double expect = (*bits)[static_cast<std::size_t>(i)] ? s[i] : 0.0;
      CHECK(r[i] == expect);
    }
  }

  // all-ones mask keeps everything; a single survivor keeps exactly one value
  const SparseMask all = dense_mask(snapshot);
  CHECK(params_equal(rewind(snapshot, all), snapshot));
  SparseMask one = all;
  for (auto& e : one.entries) std::fill(e.bits.begin(), e.bits.end(), 0);
  one.entries[0].bits[5] = 1;
  const auto single = rewind(snapshot, one);
  CHECK(single.entries[0].tensor[5] == snapshot.entries[0].tensor[5]);
  CHECK(single.entries[0].tensor[4] == 0.0);
}

TEST_CASE("rounds_to_reach matches the loop guard arithmetic") {
  CHECK(rounds_to_reach(0.30, 0.2) == 2);
  CHECK(rounds_to_reach(0.45, 0.2) == 3);
  CHECK(rounds_to_reach(0.75, 0.2) == 7);
  CHECK(rounds_to_reach(0.96, 0.2) == 15);
}

TEST_CASE("find_ticket executes the expected rounds with nested masks") {
  const Task t = make_task();
  TicketRunConfig cfg = small_config(100);
  cfg.target_sparsity = 0.30;  // exactly two rounds
  const auto outcome = find_ticket<double>(t.net, t.train, t.split.train, t.split.val, cfg);

  REQUIRE(outcome.log.rounds.size() == 2);
  CHECK(outcome.log.rounds.back().sparsity == doctest::Approx(0.36).epsilon(1e-3));
  REQUIRE(outcome.round_masks.size() == 2);
  CHECK(is_subset(outcome.round_masks[1], outcome.round_masks[0]));
  for (const auto& rl : outcome.log.rounds) {
    CHECK(rl.nesting_ok);
    CHECK(rl.rewind_bitwise_ok);
    CHECK(rl.masked_weight_max_abs == 0.0);
    CHECK(rl.budget_formula == dynamic_iteration_budget(rl.train_set_size, t.split.train.size(),
                                                        outcome.log.n0));
    CHECK(rl.prac_size > 0);
    CHECK(rl.prac_size == rl.cet_size + rl.cep_size -
                              (rl.cet_size + rl.cep_size - rl.prac_size));
  }
  // data slimming engaged: round 2 trained on fewer samples
  CHECK(outcome.log.rounds[1].train_set_size < t.split.train.size());
  // sparsity follows 1 - 0.8^round within rounding
  CHECK(outcome.log.rounds[0].sparsity == doctest::Approx(0.2).epsilon(1e-3));
}

TEST_CASE("degenerate configuration matches the plain lottery-ticket loop bitwise") {
  const Task t = make_task(3, 40);
  TicketRunConfig cfg = small_config(555);
  cfg.data_slimming = false;
  cfg.dynamic_iterations = false;
  cfg.early_stop.enabled = false;
  const auto a = find_ticket<double>(t.net, t.train, t.split.train, t.split.val, cfg);
  const auto b = vanilla_lt<double>(t.net, t.train, t.split.train, t.split.val, cfg);
  REQUIRE(a.round_masks.size() == b.round_masks.size());
  for (std::size_t k = 0; k < a.round_masks.size(); ++k)
    CHECK(hamming(a.round_masks[k], b.round_masks[k]).count == 0);
  CHECK(params_equal(a.rewind_snapshot, b.rewind_snapshot));
  CHECK(a.log.cumulative_iterations() == b.log.cumulative_iterations());
}

TEST_CASE("early stopping can only shorten rounds") {
  const Task t = make_task(3, 40);
  TicketRunConfig base = small_config(777);
  base.target_sparsity = 0.30;
  base.early_stop.enabled = false;
  TicketRunConfig stopping = base;
  stopping.early_stop.enabled = true;
  stopping.early_stop.threshold = 0.5;  // aggressive, will fire early
  const auto slow = find_ticket<double>(t.net, t.train, t.split.train, t.split.val, base);
  const auto fast = find_ticket<double>(t.net, t.train, t.split.train, t.split.val, stopping);
  REQUIRE(slow.log.rounds.size() == fast.log.rounds.size());
  CHECK(fast.log.rounds[0].iterations_used <= slow.log.rounds[0].iterations_used);
  // the aggressive threshold must have fired somewhere after the rewind epoch
  CHECK(fast.log.rounds[0].early_stop_epoch > base.rewind_epoch);
}

TEST_CASE("early stopping never fires before the rewind epoch of round one") {
  const Task t = make_task(3, 40);
  TicketRunConfig cfg = small_config(778);
  cfg.target_sparsity = 0.30;
  cfg.rewind_epoch = 3;
  cfg.early_stop.threshold = 1.1;  // any distance qualifies immediately
  const auto outcome = find_ticket<double>(t.net, t.train, t.split.train, t.split.val, cfg);
  CHECK(outcome.log.rounds[0].early_stop_epoch == 4);
}

TEST_CASE("transferred subsets reproduce the native run on the same architecture") {
  const Task t = make_task(3, 50);
  TicketRunConfig cfg = small_config(901);
  const auto native = find_ticket<double>(t.net, t.train, t.split.train, t.split.val, cfg);
  const auto transferred = find_ticket_transferred<double>(
      t.net, t.train, t.split.train, t.split.val, cfg, native.round_pracs);
  REQUIRE(native.round_masks.size() == transferred.round_masks.size());
  for (std::size_t k = 0; k < native.round_masks.size(); ++k)
    CHECK(hamming(native.round_masks[k], transferred.round_masks[k]).count == 0);
}

TEST_CASE("transfer validation requires enough source rounds") {
  const Task t = make_task(3, 50);
  TicketRunConfig cfg = small_config(902);
  std::vector<PracSet> too_few(1);
  CHECK_THROWS_AS(find_ticket_transferred<double>(t.net, t.train, t.split.train, t.split.val,
                                                  cfg, too_few),
                  InputError);
}

TEST_CASE("evaluating an all-zero mask yields chance accuracy") {
  const Task t = make_task(4, 50);
  TicketRunConfig cfg = small_config(903);
  const auto params = init_parameters<double>(t.net, RngStream(904));
  SparseMask zeros = dense_mask(params);
  for (auto& e : zeros.entries) std::fill(e.bits.begin(), e.bits.end(), 0);
  const auto eval = evaluate_ticket(t.net, t.train, t.split.train, t.split.val, t.test, zeros,
                                    params, cfg, 905);
  // constant predictor on a balanced set
  CHECK(eval.test_accuracy == doctest::Approx(0.25).epsilon(1e-9));
}
