// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_TICKET_LOG_HPP
#define PRAC_TICKET_LOG_HPP

#include <cstdint>
#include <deque>
#include <vector>

#include "prac/error.hpp"
#include "prac/forgetting.hpp"
#include "prac/mask.hpp"
#include "prac/train.hpp"

namespace prac {

// Scaled per-round budget: floor(|subset| / |full| * n0), never below one.
// Integer arithmetic keeps the floor exact.
inline long dynamic_iteration_budget(std::size_t subset_size, std::size_t full_size, long n0) {
  require(subset_size > 0 && subset_size <= full_size, "subset must be non-empty and within the full set");
  require(n0 > 0, "base iteration count must be positive");
  const long long scaled = static_cast<long long>(subset_size) * n0 /
                           static_cast<long long>(full_size);
  return scaled < 1 ? 1 : static_cast<long>(scaled);
}

struct EarlyStopConfig {
  bool enabled = true;
  double threshold = 0.07;  // normalized mask distance
  int patience = 1;         // consecutive below-threshold pairs required
  bool fifo_window = false; // compare against the worst of the last `window` masks
  int window = 5;
};

// Patience bookkeeping over a stream of consecutive-epoch mask distances.
// Stop fires once `patience` consecutive distances fall strictly below the
// threshold; a zero threshold therefore never stops.
class EarlyStopMonitor {
 public:
  explicit EarlyStopMonitor(const EarlyStopConfig& cfg) : cfg_(cfg) {}

  bool observe(double distance) {
    if (!cfg_.enabled) return false;
    if (distance < cfg_.threshold)
      ++consecutive_;
    else
      consecutive_ = 0;
    return consecutive_ >= cfg_.patience;
  }

  void reset() { consecutive_ = 0; }

 private:
  EarlyStopConfig cfg_;
  int consecutive_ = 0;
};

// One observed distance between consecutive candidate masks; returns Stop
// when the monitor's patience is exhausted.
enum class EarlyStopDecision { Continue, Stop };

inline EarlyStopDecision early_stop_check(const SparseMask& prev_candidate,
                                          const SparseMask& cur_candidate, double threshold,
                                          EarlyStopMonitor& monitor) {
  (void)threshold;  // the monitor carries the configured threshold
  const double d = hamming(prev_candidate, cur_candidate).normalized;
  return monitor.observe(d) ? EarlyStopDecision::Stop : EarlyStopDecision::Continue;
}

enum class StatsMode { PerPresentation, EpochSweep };

struct RoundLog {
  int round = 0;
  double sparsity = 0.0;  // after this round's prune
  std::size_t cet_size = 0;
  std::size_t cep_size = 0;
  std::size_t prac_size = 0;
  double overlap_rate = 0.0;  // |CET n CEP| / |CEP|, 0 when CEP is empty
  std::size_t train_set_size = 0;  // |D| entering the round
  long budget = 0;                 // iterations granted this round
  long budget_formula = 0;         // floor(|D|/|D0| * N0)
  bool budget_clamped = false;
  long iterations_used = 0;
  int epochs_run = 0;
  int early_stop_epoch = -1;  // -1 when the full budget ran
  double val_acc_last = 0.0;
  double test_accuracy = -1.0;  // filled by ticket evaluation, -1 until then
  // in-run contract audits
  double masked_weight_max_abs = 0.0;
  bool rewind_bitwise_ok = true;
  bool nesting_ok = true;
  std::vector<EpochRecord> epochs;
  std::vector<double> candidate_distances;  // one per consecutive epoch pair
};

struct RunLog {
  long n0 = 0;            // full-data per-round budget
  std::size_t d0 = 0;     // |D0|
  std::vector<RoundLog> rounds;

  long cumulative_iterations() const {
    long total = 0;
    for (const auto& r : rounds) total += r.iterations_used;
    return total;
  }
};

}  // namespace prac

#endif  // PRAC_TICKET_LOG_HPP
