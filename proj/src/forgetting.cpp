// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#include "prac/forgetting.hpp"

#include <algorithm>

#include "prac/error.hpp"

namespace prac {

void ForgettingLedger::record_presentation(std::size_t sample_index, bool predicted_correct) {
  require(sample_index < records.size(), "ledger index out of range");
  Record& r = records[sample_index];
  if (r.last_correct && !predicted_correct) ++r.forget_count;
  r.last_correct = predicted_correct;
  r.ever_correct = r.ever_correct || predicted_correct;
  ++r.presentations;
}

std::vector<std::size_t> select_cet(const ForgettingLedger& ledger, const SelectionConfig& cfg,
                                    std::span<const std::size_t> current_set) {
  std::vector<std::size_t> out;
  for (std::size_t idx : current_set) {
    require(idx < ledger.records.size(), "selection index outside ledger");
    const auto& r = ledger.records[idx];
    const bool forgetful = r.forget_count > cfg.forget_threshold;
    const bool never_learned = cfg.include_never_learned && !r.ever_correct;
    if (forgetful || never_learned) out.push_back(idx);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ForgettingHistogram forgetting_histogram(const ForgettingLedger& ledger) {
  ForgettingHistogram h;
  h.total = ledger.records.size();
  for (const auto& r : ledger.records) {
    ++h.bins[r.forget_count];
    if (!r.ever_correct) ++h.never_learned;
  }
  return h;
}

}  // namespace prac
