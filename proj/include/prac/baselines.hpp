// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_BASELINES_HPP
#define PRAC_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "prac/ticket.hpp"

namespace prac {

enum class BaselineKind {
  VanillaLt,
  RandomPrune,
  RandomTicket,
  RandomSubset,
  EntropySubset,
  SnipIterative,
};

std::string baseline_name(BaselineKind kind);
BaselineKind baseline_from_name(const std::string& name);

// Per-round budgets and subset sizes copied from a reference run so that
// comparison methods consume the same training effort and data volume.
struct BudgetMatch {
  std::vector<long> iterations;
  std::vector<std::size_t> subset_sizes;  // |P| after each round

  static BudgetMatch from_log(const RunLog& log) {
    BudgetMatch m;
    for (const auto& r : log.rounds) {
      m.iterations.push_back(r.iterations_used);
      m.subset_sizes.push_back(r.prac_size);
    }
    return m;
  }
};

// Conventional iterative train-prune-rewind on the full training set, written
// as a plain loop. Full budget every round, no data slimming, no early stop.
template <class Scalar>
TicketOutcome<Scalar> vanilla_lt(const NetworkSpec& net, const Dataset& ds,
                                 std::span<const std::size_t> d0,
                                 std::span<const std::size_t> val_ids,
                                 const TicketRunConfig& cfg_in) {
  TicketRunConfig cfg = cfg_in;
  cfg.data_slimming = false;
  cfg.dynamic_iterations = false;
  cfg.early_stop.enabled = false;
  cfg.validate(static_cast<long>(d0.size()));

  const RngStream root(cfg.seed);
  TicketOutcome<Scalar> out;
  out.theta0 = init_parameters<Scalar>(net, root.derive("init"));
  out.rewind_snapshot = out.theta0;

  const long ipe = iterations_per_epoch(d0.size(), cfg.batch_size);
  const long n0 = ipe * cfg.epochs_per_round;
  const LrSchedule schedule = make_schedule(cfg.lr_variant, ipe, cfg.epochs_per_round,
                                            cfg.milestone_epochs, cfg.warmup_epochs);
  out.log.n0 = n0;
  out.log.d0 = d0.size();

  SparseMask mask = dense_mask(out.theta0);
  int round = 0;
  while (sparsity(mask) <= cfg.target_sparsity) {
    ++round;
    ParameterSet<Scalar> params =
        round == 1 ? out.theta0 : rewind(out.rewind_snapshot, mask);
    OptimizerState<Scalar> opt =
        OptimizerState<Scalar>::zeros_like(params, cfg.momentum, cfg.weight_decay);

    TrainHooks<Scalar> hooks;
    hooks.on_epoch_end = [&](int epoch, const ParameterSet<Scalar>& p, double) {
      if (round == 1 && cfg.rewind_epoch > 0 && epoch == cfg.rewind_epoch)
        out.rewind_snapshot = p;
      return true;
    };
    TrainConfig tc;
    tc.batch_size = cfg.batch_size;
    tc.iteration_budget = n0;
    tc.schedule = schedule;
    tc.augment = cfg.augment;
    tc.augment_cfg = cfg.augment_cfg;
    tc.seed = cfg.seed;
    tc.round_index = round;
    const TrainResult tr =
        train_on_subset(net, params, opt, &mask, ds, d0, val_ids, tc, &hooks);

    SparseMask next_mask = magnitude_prune(params, mask, cfg.prune);

    RoundLog rl;
    rl.round = round;
    rl.train_set_size = d0.size();
    rl.budget = n0;
    rl.budget_formula = n0;
    rl.iterations_used = tr.iterations;
    rl.epochs_run = static_cast<int>(tr.epochs.size());
    rl.epochs = tr.epochs;
    rl.val_acc_last = tr.epochs.empty() ? 0.0 : tr.epochs.back().val_accuracy;
    rl.masked_weight_max_abs = detail::masked_weight_max_abs(params, mask);
    rl.rewind_bitwise_ok = true;
    rl.nesting_ok = is_subset(next_mask, mask);
    rl.sparsity = sparsity(next_mask);
    rl.prac_size = d0.size();
    out.log.rounds.push_back(std::move(rl));

    out.round_masks.push_back(next_mask);
    out.round_pracs.emplace_back();
    out.round_histograms.emplace_back();
    mask = std::move(next_mask);
  }
  out.mask = mask;
  return out;
}

// A mask with the same per-layer survivor counts as the reference, positions
// drawn uniformly. Used for random-pruning comparison curves.
SparseMask random_prune_mask(const SparseMask& reference, std::uint64_t seed,
                             bool global = false);

// Random survivors drawn only from the parent's kept positions, with the
// per-layer counts of `reference`; chains random masks into a nested
// sequence the way iterative random pruning would.
SparseMask random_prune_within(const SparseMask& parent, const SparseMask& reference,
                               RngStream& rng);

// Fresh fan-in-scaled initialization with the mask applied; the control for
// how much of a ticket's quality is owed to its paired initialization.
template <class Scalar>
ParameterSet<Scalar> random_ticket(const NetworkSpec& net, const SparseMask& mask,
                                   std::uint64_t seed) {
  return apply_mask(init_parameters<Scalar>(net, RngStream(seed).derive("random-ticket")),
                    mask);
}

// Softmax entropy of one logits row, computed through logsumexp.
template <class Scalar>
double softmax_entropy(const Scalar* row, Index classes) {
  Scalar mx = row[0];
  for (Index c = 1; c < classes; ++c) mx = std::max(mx, row[c]);
  double sum = 0.0;
  for (Index c = 0; c < classes; ++c) sum += std::exp(static_cast<double>(row[c] - mx));
  const double lse = std::log(sum);
  double h = 0.0;
  for (Index c = 0; c < classes; ++c) {
    const double z = static_cast<double>(row[c] - mx);
    h += std::exp(z - lse) * (lse - z);
  }
  return h;
}

enum class SubsetKind { Random, Entropy };

// Uniform sample without replacement, or the `size` samples with the largest
// prediction entropy under the given model state (ties to the lower index).
// Output indices are sorted.
template <class Scalar>
std::vector<std::size_t> subset_sampler(SubsetKind kind, const NetworkSpec& net,
                                        const ParameterSet<Scalar>& params,
                                        const SparseMask* mask, const Dataset& ds,
                                        std::span<const std::size_t> pool, std::size_t size,
                                        const AugmentConfig& normalization,
                                        std::uint64_t seed) {
  require(size > 0 && size <= pool.size(), "subset size out of range");
  std::vector<std::size_t> out;
  if (kind == SubsetKind::Random) {
    std::vector<std::size_t> ids(pool.begin(), pool.end());
    RngStream rng = RngStream(seed).derive("subset-random");
    shuffle(ids, rng);
    out.assign(ids.begin(), ids.begin() + static_cast<long>(size));
  } else {
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(pool.size());
    for (std::size_t start = 0; start < pool.size(); start += 512) {
      const std::size_t stop = std::min(pool.size(), start + 512);
      std::span<const std::size_t> ids = pool.subspan(start, stop - start);
      const Tensor<Scalar> batch = assemble_batch<Scalar>(ds, ids, normalization, nullptr);
      const Tensor<Scalar> logits = forward(net, params, mask, batch);
      const Index classes = logits.shape[1];
      for (std::size_t k = 0; k < ids.size(); ++k)
        scored.emplace_back(
            softmax_entropy(logits.data() + static_cast<Index>(k) * classes, classes),
            ids[k]);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    out.reserve(size);
    for (std::size_t k = 0; k < size; ++k) out.push_back(scored[k].second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Connection saliency |g .* w| from a single batch; the gradient is taken at
// the given parameters under the given mask.
template <class Scalar>
ParameterSet<Scalar> snip_scores(const NetworkSpec& net, const ParameterSet<Scalar>& params,
                                 const SparseMask* mask, const Tensor<Scalar>& batch,
                                 std::span<const int> labels) {
  BackwardOut<Scalar> back = backward(net, params, mask, batch, labels);
  ParameterSet<Scalar> scores = std::move(back.grads);
  for (std::size_t k = 0; k < scores.entries.size(); ++k) {
    auto& s = scores.entries[k].tensor;
    const auto& w = params.entries[k].tensor;
    for (Index i = 0; i < s.size(); ++i)
      s[i] = std::abs(s[i] * w[i]);
  }
  return scores;
}

// Budget-matched lottery-ticket run on per-round subsets that are either
// uniformly sampled or chosen by maximum prediction entropy.
template <class Scalar>
TicketOutcome<Scalar> subset_lt(SubsetKind kind, const NetworkSpec& net, const Dataset& ds,
                                std::span<const std::size_t> d0,
                                std::span<const std::size_t> val_ids,
                                const TicketRunConfig& cfg_in, const BudgetMatch& match) {
  TicketRunConfig cfg = cfg_in;
  cfg.data_slimming = false;
  cfg.early_stop.enabled = false;
  detail::ImpHooks<Scalar> imp;
  imp.forced_budgets = &match.iterations;
  imp.next_subset = [kind, &net, &ds, d0, &cfg, &match](
                        const detail::RoundContext<Scalar>& ctx) {
    require(static_cast<std::size_t>(ctx.round) <= match.subset_sizes.size(),
            "budget match does not cover round " + std::to_string(ctx.round));
    const std::size_t size =
        std::min(match.subset_sizes[static_cast<std::size_t>(ctx.round - 1)], d0.size());
    const std::vector<std::size_t> ids = subset_sampler(
        kind, net, *ctx.theta_t, ctx.mask_after, ds, d0, size, cfg.augment_cfg,
        RngStream(cfg.seed).derive("subset", static_cast<std::uint64_t>(ctx.round)).seed());
    PracSet set;
    set.indices = ids;
    set.provenance.assign(ids.size(), 0);
    return set;
  };
  return detail::run_imp_loop(net, ds, d0, val_ids, cfg, imp);
}

// Budget-matched iterative pruning ranked by single-batch saliency instead of
// weight magnitude; subset sizes follow the reference run as well.
template <class Scalar>
TicketOutcome<Scalar> snip_iterative(const NetworkSpec& net, const Dataset& ds,
                                     std::span<const std::size_t> d0,
                                     std::span<const std::size_t> val_ids,
                                     const TicketRunConfig& cfg_in, const BudgetMatch& match) {
  TicketRunConfig cfg = cfg_in;
  cfg.data_slimming = false;
  cfg.early_stop.enabled = false;
  detail::ImpHooks<Scalar> imp;
  imp.forced_budgets = &match.iterations;
  imp.prune_fn = [&net, &ds, &cfg](const ParameterSet<Scalar>& params, const SparseMask& mask,
                                   int round, std::span<const std::size_t> current) {
    // one deterministic batch from the current subset
    std::vector<std::size_t> ids(current.begin(), current.end());
    RngStream rng = RngStream(cfg.seed).derive("snip-batch", static_cast<std::uint64_t>(round));
    shuffle(ids, rng);
    ids.resize(std::min<std::size_t>(ids.size(), static_cast<std::size_t>(cfg.batch_size)));
    const Tensor<Scalar> batch =
        assemble_batch<Scalar>(ds, ids, cfg.augment_cfg, nullptr);
    const std::vector<int> labels = gather_labels(ds, ids);
    const ParameterSet<Scalar> scores =
        snip_scores(net, params, &mask, batch, std::span<const int>(labels));
    return prune_by_score(params, mask, cfg.prune,
                          [&scores](const typename ParameterSet<Scalar>::Entry& e, Index i) {
                            const auto* s = scores.find(e.name);
                            return static_cast<double>(s->tensor[i]);
                          });
  };
  imp.next_subset = [&ds, d0, &cfg, &match](const detail::RoundContext<Scalar>& ctx) {
    require(static_cast<std::size_t>(ctx.round) <= match.subset_sizes.size(),
            "budget match does not cover round " + std::to_string(ctx.round));
    const std::size_t size =
        std::min(match.subset_sizes[static_cast<std::size_t>(ctx.round - 1)], d0.size());
    std::vector<std::size_t> ids(d0.begin(), d0.end());
    RngStream rng =
        RngStream(cfg.seed).derive("snip-subset", static_cast<std::uint64_t>(ctx.round));
    shuffle(ids, rng);
    ids.resize(size);
    std::sort(ids.begin(), ids.end());
    PracSet set;
    set.indices = std::move(ids);
    set.provenance.assign(size, 0);
    return set;
  };
  return detail::run_imp_loop(net, ds, d0, val_ids, cfg, imp);
}

}  // namespace prac

#endif  // PRAC_BASELINES_HPP
