// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_EXPERIMENT_HPP
#define PRAC_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "prac/config.hpp"
#include "prac/ticket_log.hpp"

namespace prac {

// One summary.csv record; a run contributes one row per round.
struct SummaryRow {
  std::string method;
  std::uint64_t seed = 0;
  int round = 0;
  double sparsity_pct = 0.0;
  std::size_t prac_size = 0;
  long iterations_used = 0;
  long cumulative_iterations = 0;
  int early_stop_epoch = -1;
  double val_acc = 0.0;
  double test_acc = -1.0;  // negative: round not evaluated
};

extern const std::vector<std::string> kSummaryColumns;

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> summary_rows(const std::string& method, std::uint64_t seed,
                                     const RunLog& log);

// Runs the configured experiment: the data-slimmed ticket search first, then
// every configured baseline against its recorded budgets, across all seeds.
// Produces per-run directories, a combined summary.csv, a timings.csv
// sidecar, and the report files. Wall time lives only in timings.csv so
// summary.csv stays byte-identical across repeated runs.
void run_experiment(const ExperimentConfig& cfg);

// Re-runs the pruning loop on a target architecture using the training
// subsets persisted by a source run (no statistics are recomputed).
void run_transfer(const std::string& source_run_dir, const std::string& target_arch,
                  const std::string& out_dir, long seed_override = -1);

}  // namespace prac

#endif  // PRAC_EXPERIMENT_HPP
