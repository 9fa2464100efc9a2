// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_TICKET_HPP
#define PRAC_TICKET_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prac/data.hpp"
#include "prac/disagreement.hpp"
#include "prac/forgetting.hpp"
#include "prac/layers.hpp"
#include "prac/optimizer.hpp"
#include "prac/prac_set.hpp"
#include "prac/prune.hpp"
#include "prac/schedule.hpp"
#include "prac/ticket_log.hpp"
#include "prac/train.hpp"

namespace prac {

struct TicketRunConfig {
  double target_sparsity = 0.75;  // loop until mask sparsity exceeds this
  PruneConfig prune;              // ratio 0.2, global ranking
  int epochs_per_round = 8;
  long batch_size = 128;
  int rewind_epoch = 3;  // 0 rewinds to the random initialization
  SelectionConfig selection;
  bool data_slimming = true;      // off: train on the full set every round
  bool dynamic_iterations = true; // off: every round gets the full budget
  EarlyStopConfig early_stop;
  StatsMode stats_mode = StatsMode::PerPresentation;
  LrVariant lr_variant = LrVariant::Standard;
  std::vector<long> milestone_epochs{4, 6};
  long warmup_epochs = 2;  // only used by the warmup variant
  bool augment = false;
  AugmentConfig augment_cfg;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  std::uint64_t seed = 1;

  void validate(long d0_size) const {
    require(target_sparsity > 0.0 && target_sparsity < 1.0,
            "target sparsity must be in (0,1)");
    require(prune.ratio > 0.0 && prune.ratio < 1.0, "prune ratio must be in (0,1)");
    require(epochs_per_round > 0, "need at least one epoch per round");
    require(rewind_epoch >= 0 && rewind_epoch < epochs_per_round,
            "rewind epoch must lie within a round");
    require(batch_size > 0 && batch_size <= d0_size, "bad batch size");
  }
};

// Rounds executed before the sparsity guard fails: the smallest k with
// 1 - (1-ratio)^k > target.
inline int rounds_to_reach(double target_sparsity, double ratio) {
  int k = 0;
  double remaining = 1.0;
  while (1.0 - remaining <= target_sparsity) {
    remaining *= 1.0 - ratio;
    ++k;
  }
  return k;
}

// Surviving weights take the snapshot values bitwise, dropped positions are
// exactly zero. Callers start from a fresh optimizer state.
template <class Scalar>
ParameterSet<Scalar> rewind(const ParameterSet<Scalar>& snapshot, const SparseMask& mask) {
  return apply_mask(snapshot, mask);
}

template <class Scalar>
struct TicketOutcome {
  SparseMask mask;                      // final mask
  std::vector<SparseMask> round_masks;  // mask after each round's prune
  std::vector<PracSet> round_pracs;     // training set built at each round's end
  std::vector<ForgettingHistogram> round_histograms;
  PracSet final_prac;
  RunLog log;
  ParameterSet<Scalar> theta0;
  ParameterSet<Scalar> rewind_snapshot;
};

namespace detail {

template <class Scalar>
double masked_weight_max_abs(const ParameterSet<Scalar>& params, const SparseMask& mask) {
  double worst = 0.0;
  for (const auto& e : params.entries) {
    if (!e.prunable) continue;
    const SparseMask::Entry* m = mask.find(e.name);
    for (Index i = 0; i < e.tensor.size(); ++i)
      if (!m->bits[static_cast<std::size_t>(i)])
        worst = std::max(worst, std::abs(static_cast<double>(e.tensor[i])));
  }
  return worst;
}

template <class Scalar>
bool surviving_match_bitwise(const ParameterSet<Scalar>& params,
                             const ParameterSet<Scalar>& snapshot, const SparseMask& mask) {
  for (std::size_t k = 0; k < params.entries.size(); ++k) {
    const auto& a = params.entries[k].tensor;
    const auto& b = snapshot.entries[k].tensor;
    if (!params.entries[k].prunable) {
      for (Index i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
      continue;
    }
    const SparseMask::Entry* m = mask.find(params.entries[k].name);
    for (Index i = 0; i < a.size(); ++i) {
      const bool kept = m->bits[static_cast<std::size_t>(i)] != 0;
      if (kept && a[i] != b[i]) return false;
      if (!kept && a[i] != Scalar(0)) return false;
    }
  }
  return true;
}

// Everything the subset provider may look at after a round finished.
template <class Scalar>
struct RoundContext {
  int round = 0;
  const ParameterSet<Scalar>* theta_t = nullptr;   // trained weights
  const SparseMask* mask_before = nullptr;         // mask trained under
  const SparseMask* mask_after = nullptr;          // freshly pruned mask
  const ForgettingLedger* ledger = nullptr;
  std::span<const std::size_t> current;            // this round's training set
};

// Customization points for the shared train-prune-select loop.
template <class Scalar>
struct ImpHooks {
  // Builds the next round's training set (and its bookkeeping). Unset means
  // the training set never changes (vanilla behaviour).
  std::function<PracSet(const RoundContext<Scalar>&)> next_subset;
  // Pruning rule; unset means global magnitude pruning.
  std::function<SparseMask(const ParameterSet<Scalar>&, const SparseMask&, int round,
                           std::span<const std::size_t> current)>
      prune_fn;
  // Per-round iteration budgets copied from a reference run; unset means the
  // dynamic formula (or the full budget when dynamic iterations are off).
  const std::vector<long>* forced_budgets = nullptr;
  bool needs_ledger = false;
};

template <class Scalar>
TicketOutcome<Scalar> run_imp_loop(const NetworkSpec& net, const Dataset& ds,
                                   std::span<const std::size_t> d0,
                                   std::span<const std::size_t> val_ids,
                                   const TicketRunConfig& cfg, const ImpHooks<Scalar>& imp) {
  require(!d0.empty(), "empty base training set");
  cfg.validate(static_cast<long>(d0.size()));

  const RngStream root(cfg.seed);
  TicketOutcome<Scalar> out;
  out.theta0 = init_parameters<Scalar>(net, root.derive("init"));
  out.rewind_snapshot = out.theta0;  // replaced at epoch `rewind_epoch` of round 1

  const long ipe_full = iterations_per_epoch(d0.size(), cfg.batch_size);
  const long n0 = ipe_full * cfg.epochs_per_round;
  const LrSchedule base_schedule = make_schedule(
      cfg.lr_variant, ipe_full, cfg.epochs_per_round, cfg.milestone_epochs, cfg.warmup_epochs);
  out.log.n0 = n0;
  out.log.d0 = d0.size();

  SparseMask mask = dense_mask(out.theta0);
  std::vector<std::size_t> current(d0.begin(), d0.end());
  ForgettingLedger ledger(static_cast<std::size_t>(ds.n));

  int round = 0;
  while (sparsity(mask) <= cfg.target_sparsity) {
    ++round;
    RoundLog rl;
    rl.round = round;
    rl.train_set_size = current.size();

    rl.budget_formula = dynamic_iteration_budget(current.size(), d0.size(), n0);
    if (imp.forced_budgets) {
      require(static_cast<std::size_t>(round) <= imp.forced_budgets->size(),
              "forced budgets do not cover round " + std::to_string(round));
      rl.budget = (*imp.forced_budgets)[round - 1];
    } else if (cfg.dynamic_iterations) {
      const long min_budget = iterations_per_epoch(current.size(), cfg.batch_size);
      rl.budget = std::max(rl.budget_formula, min_budget);
      rl.budget_clamped = rl.budget != rl.budget_formula;
    } else {
      rl.budget = n0;
    }

    LrSchedule schedule = base_schedule;
    if (rl.budget < n0) {
      schedule =
          rescale_schedule(base_schedule, static_cast<double>(rl.budget) /
                                              static_cast<double>(n0));
      if (schedule.total_iterations < rl.budget) schedule.total_iterations = rl.budget;
    }

    ParameterSet<Scalar> params =
        round == 1 ? out.theta0 : rewind(out.rewind_snapshot, mask);
    rl.rewind_bitwise_ok =
        round == 1 || surviving_match_bitwise(params, out.rewind_snapshot, mask);
    OptimizerState<Scalar> opt =
        OptimizerState<Scalar>::zeros_like(params, cfg.momentum, cfg.weight_decay);

    ledger.reset();
    EarlyStopMonitor monitor(cfg.early_stop);
    std::optional<SparseMask> prev_candidate;
    std::deque<SparseMask> candidate_fifo;
    int stop_epoch = -1;

    TrainHooks<Scalar> hooks;
    if (imp.needs_ledger && cfg.stats_mode == StatsMode::PerPresentation) {
      hooks.on_predictions = [&ledger](std::span<const std::size_t> ids,
                                       std::span<const int> pred,
                                       std::span<const int> labels) {
        for (std::size_t k = 0; k < ids.size(); ++k)
          ledger.record_presentation(ids[k], pred[k] == labels[k]);
      };
    }
    hooks.on_epoch_end = [&](int epoch, const ParameterSet<Scalar>& p, double) {
      if (round == 1 && cfg.rewind_epoch > 0 && epoch == cfg.rewind_epoch)
        out.rewind_snapshot = p;
      if (imp.needs_ledger && cfg.stats_mode == StatsMode::EpochSweep) {
        for (std::size_t start = 0; start < current.size(); start += 512) {
          const std::size_t stop = std::min(current.size(), start + 512);
          std::span<const std::size_t> ids(current.data() + start, stop - start);
          const Tensor<Scalar> batch =
              assemble_batch<Scalar>(ds, ids, cfg.augment_cfg, nullptr);
          const std::vector<int> labels = gather_labels(ds, ids);
          const std::vector<int> pred = argmax_rows(forward(net, p, &mask, batch));
          for (std::size_t k = 0; k < ids.size(); ++k)
            ledger.record_presentation(ids[k], pred[k] == labels[k]);
        }
      }
      if (!cfg.early_stop.enabled) return true;
      SparseMask cand = candidate_mask(p, mask, cfg.prune);
      bool stop = false;
      const bool allowed = round > 1 || epoch > cfg.rewind_epoch;
      if (cfg.early_stop.fifo_window) {
        if (!candidate_fifo.empty()) {
          double worst = 0.0;
          for (const auto& m : candidate_fifo)
            worst = std::max(worst, hamming(cand, m).normalized);
          rl.candidate_distances.push_back(worst);
          if (allowed &&
              candidate_fifo.size() + 1 >= static_cast<std::size_t>(cfg.early_stop.window))
            stop = worst < cfg.early_stop.threshold;
        }
        candidate_fifo.push_back(cand);
        while (candidate_fifo.size() >= static_cast<std::size_t>(cfg.early_stop.window))
          candidate_fifo.pop_front();
      } else if (prev_candidate) {
        const double d = hamming(*prev_candidate, cand).normalized;
        rl.candidate_distances.push_back(d);
        if (allowed && monitor.observe(d)) stop = true;
      }
      prev_candidate = std::move(cand);
      if (stop) stop_epoch = epoch;
      return !stop;
    };

    TrainConfig tc;
    tc.batch_size = cfg.batch_size;
    tc.iteration_budget = rl.budget;
    tc.schedule = schedule;
    tc.augment = cfg.augment;
    tc.augment_cfg = cfg.augment_cfg;
    tc.seed = cfg.seed;
    tc.round_index = round;
    const TrainResult tr =
        train_on_subset(net, params, opt, &mask, ds, current, val_ids, tc, &hooks);

    rl.iterations_used = tr.iterations;
    rl.epochs_run = static_cast<int>(tr.epochs.size());
    rl.early_stop_epoch = stop_epoch;
    rl.epochs = tr.epochs;
    rl.val_acc_last = tr.epochs.empty() ? 0.0 : tr.epochs.back().val_accuracy;
    rl.masked_weight_max_abs = masked_weight_max_abs(params, mask);

    SparseMask next_mask = imp.prune_fn ? imp.prune_fn(params, mask, round, current)
                                        : magnitude_prune(params, mask, cfg.prune);
    rl.nesting_ok = is_subset(next_mask, mask);
    rl.sparsity = sparsity(next_mask);

    PracSet prac;
    if (imp.next_subset) {
      RoundContext<Scalar> ctx;
      ctx.round = round;
      ctx.theta_t = &params;
      ctx.mask_before = &mask;
      ctx.mask_after = &next_mask;
      ctx.ledger = &ledger;
      ctx.current = current;
      prac = imp.next_subset(ctx);
      require(!prac.indices.empty(),
              "degenerate run: the selected training subset is empty at round " +
                  std::to_string(round));
      rl.cet_size = prac.cet_size;
      rl.cep_size = prac.cep_size;
      rl.prac_size = prac.size();
      rl.overlap_rate = prac.cep_size ? static_cast<double>(prac.overlap()) /
                                            static_cast<double>(prac.cep_size)
                                      : 0.0;
      current.assign(prac.indices.begin(), prac.indices.end());
    } else {
      rl.prac_size = current.size();
    }

    out.round_masks.push_back(next_mask);
    out.round_pracs.push_back(std::move(prac));
    out.round_histograms.push_back(forgetting_histogram(ledger));
    out.log.rounds.push_back(std::move(rl));
    mask = std::move(next_mask);
  }

  out.mask = mask;
  out.final_prac = out.round_pracs.empty() ? PracSet{} : out.round_pracs.back();
  return out;
}

}  // namespace detail

// Alternating data and model slimming: train the masked network on the
// current subset, harvest forgetting statistics (CET), prune the smallest
// surviving magnitudes, harvest prediction disagreements over the full set
// (CEP), and continue on their union until the target sparsity is passed.
// Round 1 additionally records the rewind snapshot used by all later rounds.
template <class Scalar>
TicketOutcome<Scalar> find_ticket(const NetworkSpec& net, const Dataset& ds,
                                  std::span<const std::size_t> d0,
                                  std::span<const std::size_t> val_ids,
                                  const TicketRunConfig& cfg) {
  detail::ImpHooks<Scalar> imp;
  if (cfg.data_slimming) {
    imp.needs_ledger = true;
    imp.next_subset = [&net, &ds, d0, &cfg](const detail::RoundContext<Scalar>& ctx) {
      const std::vector<std::size_t> cet = select_cet(*ctx.ledger, cfg.selection, ctx.current);
      const std::vector<std::size_t> cep = select_cep(
          net, *ctx.theta_t, *ctx.mask_before, *ctx.mask_after, ds, d0, cfg.augment_cfg);
      PracSet prac = build_prac(cet, cep);
      if (prac.indices.empty())
        throw InputError(
            "degenerate run: no forgetting events, no never-learned samples and no "
            "pruning disagreement at round " +
            std::to_string(ctx.round));
      return prac;
    };
  }
  return detail::run_imp_loop(net, ds, d0, val_ids, cfg, imp);
}

// The same loop fed with training subsets exported by a source-architecture
// run: round k >= 2 trains on the source's round-(k-1) set; no forgetting or
// disagreement statistics are computed on the target.
template <class Scalar>
TicketOutcome<Scalar> find_ticket_transferred(const NetworkSpec& net, const Dataset& ds,
                                              std::span<const std::size_t> d0,
                                              std::span<const std::size_t> val_ids,
                                              const TicketRunConfig& cfg,
                                              std::span<const PracSet> source_sets) {
  const int rounds = rounds_to_reach(cfg.target_sparsity, cfg.prune.ratio);
  require(static_cast<int>(source_sets.size()) >= rounds - 1,
          "transferred sets cover " + std::to_string(source_sets.size()) +
              " rounds but the target sparsity needs " + std::to_string(rounds));
  detail::ImpHooks<Scalar> imp;
  imp.next_subset = [source_sets](const detail::RoundContext<Scalar>& ctx) {
    return source_sets[static_cast<std::size_t>(ctx.round - 1)];
  };
  return detail::run_imp_loop(net, ds, d0, val_ids, cfg, imp);
}

enum class TicketInit { Rewind, Theta0, RandomReinit };

struct EvalOutcome {
  double test_accuracy = 0.0;
  double best_val_accuracy = 0.0;
  int best_epoch = 0;
  std::vector<EpochRecord> epochs;
};

// Retrain the masked network from the given initialization on the full
// training set with the full unscaled schedule, then report test accuracy of
// the best-validation epoch.
template <class Scalar>
EvalOutcome evaluate_ticket(const NetworkSpec& net, const Dataset& ds,
                            std::span<const std::size_t> train_ids,
                            std::span<const std::size_t> val_ids, const Dataset& test_ds,
                            const SparseMask& mask, const ParameterSet<Scalar>& init,
                            const TicketRunConfig& cfg, std::uint64_t eval_seed) {
  ParameterSet<Scalar> params = apply_mask(init, mask);
  OptimizerState<Scalar> opt =
      OptimizerState<Scalar>::zeros_like(params, cfg.momentum, cfg.weight_decay);

  const long ipe = iterations_per_epoch(train_ids.size(), cfg.batch_size);
  TrainConfig tc;
  tc.batch_size = cfg.batch_size;
  tc.iteration_budget = ipe * cfg.epochs_per_round;
  tc.schedule = make_schedule(cfg.lr_variant, ipe, cfg.epochs_per_round, cfg.milestone_epochs,
                              cfg.warmup_epochs);
  tc.augment = cfg.augment;
  tc.augment_cfg = cfg.augment_cfg;
  tc.seed = eval_seed;
  tc.round_index = 1;

  EvalOutcome out;
  ParameterSet<Scalar> best = params;
  TrainHooks<Scalar> hooks;
  hooks.on_epoch_end = [&](int epoch, const ParameterSet<Scalar>& p, double val_acc) {
    if (epoch == 1 || val_acc > out.best_val_accuracy) {
      out.best_val_accuracy = val_acc;
      out.best_epoch = epoch;
      best = p;
    }
    return true;
  };
  const TrainResult tr =
      train_on_subset(net, params, opt, &mask, ds, train_ids, val_ids, tc, &hooks);
  out.epochs = tr.epochs;

  std::vector<std::size_t> test_ids(static_cast<std::size_t>(test_ds.n));
  for (std::size_t i = 0; i < test_ids.size(); ++i) test_ids[i] = i;
  out.test_accuracy = evaluate_accuracy(net, best, &mask, test_ds, test_ids, cfg.augment_cfg);
  return out;
}

}  // namespace prac

#endif  // PRAC_TICKET_HPP
