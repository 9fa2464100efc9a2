// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_FORGETTING_HPP
#define PRAC_FORGETTING_HPP

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace prac {

// Per-sample training dynamics, keyed by original dataset index. A forgetting
// event is a transition from classified-correctly to classified-wrongly
// between consecutive presentations of the same sample.
struct ForgettingLedger {
  struct Record {
    bool last_correct = false;
    bool ever_correct = false;
    std::uint32_t forget_count = 0;
    std::uint32_t presentations = 0;
  };

  explicit ForgettingLedger(std::size_t dataset_size = 0) : records(dataset_size) {}

  std::vector<Record> records;

  std::size_t size() const { return records.size(); }

  void reset() {
    for (auto& r : records) r = Record{};
  }

  void record_presentation(std::size_t sample_index, bool predicted_correct);
};

struct SelectionConfig {
  std::uint32_t forget_threshold = 0;      // E_F
  bool include_never_learned = true;
};

// Samples of `current_set` whose forget count exceeds the threshold, plus the
// never-learned ones when configured. Output is sorted and duplicate-free.
std::vector<std::size_t> select_cet(const ForgettingLedger& ledger, const SelectionConfig& cfg,
                                    std::span<const std::size_t> current_set);

struct ForgettingHistogram {
  std::map<std::uint32_t, std::size_t> bins;  // forget count -> samples
  std::size_t never_learned = 0;              // also counted inside bins[...]
  std::size_t total = 0;
};

ForgettingHistogram forgetting_histogram(const ForgettingLedger& ledger);

}  // namespace prac

#endif  // PRAC_FORGETTING_HPP
