// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_CONFIG_HPP
#define PRAC_CONFIG_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "prac/baselines.hpp"
#include "prac/data.hpp"
#include "prac/ticket.hpp"

namespace prac {

enum class Precision { F64, F32 };

struct DatasetSpec {
  std::string kind = "synthetic";  // synthetic | idx | raw
  // geometry (required for raw; derived for idx; free for synthetic)
  int classes = 10;
  long channels = 1, height = 12, width = 12;
  // synthetic
  long train_per_class = 1000, test_per_class = 200;
  double spread = 26.0;
  double ambiguous_fraction = 0.12;
  std::uint64_t seed = 7;
  // idx
  std::string images, labels, test_images, test_labels;
  // raw
  std::string path, test_path;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string method = "prac";  // recorded per run directory
  Precision precision = Precision::F64;
  std::string arch = "mlp";
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int threads = 1;
  std::vector<int> eval_rounds;  // empty: evaluate the final round only
  DatasetSpec dataset;
  SplitSpec split;
  TicketRunConfig ticket;  // per-run seed is overwritten from `seeds`
  std::vector<BaselineKind> baselines;
  std::string out = "runs/experiment";

  void validate() const;
};

// Flat "key = value" schema; unknown keys are rejected.
ExperimentConfig parse_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_kv(
    const std::vector<std::pair<std::string, std::string>>& kv);
std::vector<std::pair<std::string, std::string>> experiment_config_kv(
    const ExperimentConfig& cfg);

// Train and test datasets for the configured spec.
struct DatasetPair {
  Dataset train;
  Dataset test;
};
DatasetPair build_datasets(const DatasetSpec& spec);

}  // namespace prac

#endif  // PRAC_CONFIG_HPP
