// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_RUNDIR_HPP
#define PRAC_RUNDIR_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "prac/data.hpp"
#include "prac/mask.hpp"
#include "prac/prac_set.hpp"
#include "prac/ticket.hpp"
#include "prac/ticket_log.hpp"

namespace prac {

// One run persists as:
//   <dir>/rounds.csv                  per-round summary of the loop
//   <dir>/round_<k>/mask.bin          mask after the round's prune
//   <dir>/round_<k>/prac.txt          training set built at the round's end
//   <dir>/round_<k>/log.csv           per-epoch records
//   <dir>/round_<k>/forgetting.csv    forget-count histogram
//   <dir>/round_<k>/class_hist.csv    per-class counts of the built set
//   <dir>/round_1/rewind.bin          the rewind snapshot
struct RunDirPaths {
  std::filesystem::path root;

  explicit RunDirPaths(std::string dir) : root(std::move(dir)) {}
  std::filesystem::path rounds_csv() const { return root / "rounds.csv"; }
  std::filesystem::path round_dir(int k) const {
    return root / ("round_" + std::to_string(k));
  }
  std::filesystem::path mask_path(int k) const { return round_dir(k) / "mask.bin"; }
  std::filesystem::path prac_path(int k) const { return round_dir(k) / "prac.txt"; }
  std::filesystem::path log_path(int k) const { return round_dir(k) / "log.csv"; }
  std::filesystem::path forgetting_path(int k) const {
    return round_dir(k) / "forgetting.csv";
  }
  std::filesystem::path class_hist_path(int k) const {
    return round_dir(k) / "class_hist.csv";
  }
  std::filesystem::path rewind_path() const { return round_dir(1) / "rewind.bin"; }
};

extern const std::vector<std::string> kRoundsCsvColumns;

void write_rounds_csv(const std::filesystem::path& path, const RunLog& log);
RunLog load_rounds_csv(const std::filesystem::path& path);

void write_epoch_log_csv(const std::filesystem::path& path, const RoundLog& round);
void write_forgetting_csv(const std::filesystem::path& path, const ForgettingHistogram& hist);
void write_class_hist_csv(const std::filesystem::path& path,
                          const std::vector<std::size_t>& counts);

// Flat "key = value" configuration lines.
void write_config_txt(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& kv);
std::vector<std::pair<std::string, std::string>> read_config_txt(
    const std::filesystem::path& path);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> problems;

  void fail(std::string what) {
    ok = false;
    problems.push_back(std::move(what));
  }
};

// Recomputes sparsity, nesting and set identities from the persisted
// artifacts alone.
VerifyReport verify_run_dir(const std::string& dir);

// Everything of a finished run, including per-round class histograms computed
// against the dataset labels when provided.
template <class Scalar>
void persist_run(const std::string& dir, const TicketOutcome<Scalar>& outcome,
                 const Dataset* ds_for_labels = nullptr) {
  const RunDirPaths paths(dir);
  std::filesystem::create_directories(paths.root);
  write_rounds_csv(paths.rounds_csv(), outcome.log);
  for (std::size_t k = 0; k < outcome.round_masks.size(); ++k) {
    const int round = static_cast<int>(k) + 1;
    std::filesystem::create_directories(paths.round_dir(round));
    save_mask(paths.mask_path(round).string(), outcome.round_masks[k]);
    write_epoch_log_csv(paths.log_path(round), outcome.log.rounds[k]);
    write_forgetting_csv(paths.forgetting_path(round), outcome.round_histograms[k]);
    if (!outcome.round_pracs[k].indices.empty()) {
      save_prac(paths.prac_path(round).string(), outcome.round_pracs[k], round);
      if (ds_for_labels)
        write_class_hist_csv(paths.class_hist_path(round),
                             class_histogram(outcome.round_pracs[k], ds_for_labels->labels,
                                             ds_for_labels->class_count));
    }
  }
  save_checkpoint(paths.rewind_path().string(), outcome.rewind_snapshot);
}

}  // namespace prac

#endif  // PRAC_RUNDIR_HPP
