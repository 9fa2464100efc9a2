// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#include "prac/config.hpp"

#include <map>
#include <sstream>

#include "prac/csvfmt.hpp"
#include "prac/rundir.hpp"

namespace prac {

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw InputError("bad boolean '" + v + "' for " + key);
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InputError("bad number '" + v + "' for " + key);
  }
}

long parse_long(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const long d = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InputError("bad integer '" + v + "' for " + key);
  }
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

template <class T>
std::string list_str(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

std::string doubles_str(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(v[i], 6);
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  require(!seeds.empty(), "need at least one seed");
  require(threads >= 1, "threads must be positive");
  require(arch == "mlp" || arch == "cnn", "unknown architecture '" + arch + "'");
  require(dataset.kind == "synthetic" || dataset.kind == "idx" || dataset.kind == "raw",
          "unknown dataset kind '" + dataset.kind + "'");
  require(!out.empty(), "output directory must be set");
  for (int r : eval_rounds) require(r >= 1, "eval rounds are 1-based");
}

ExperimentConfig parse_experiment_kv(
    const std::vector<std::pair<std::string, std::string>>& kv) {
  ExperimentConfig cfg;
  cfg.eval_rounds.clear();
  cfg.seeds.clear();
  cfg.baselines.clear();
  std::map<std::string, std::string> seen;
  for (const auto& [key, value] : kv) {
    require(!seen.count(key), "duplicate config key '" + key + "'");
    seen[key] = value;
    if (key == "name") cfg.name = value;
    else if (key == "method") cfg.method = value;
    else if (key == "precision") {
      if (value == "f64") cfg.precision = Precision::F64;
      else if (value == "f32") cfg.precision = Precision::F32;
      else throw InputError("precision must be f64 or f32");
    } else if (key == "arch") cfg.arch = value;
    else if (key == "seeds") {
      for (const auto& s : split_list(value))
        cfg.seeds.push_back(static_cast<std::uint64_t>(parse_long(s, key)));
    } else if (key == "threads") cfg.threads = static_cast<int>(parse_long(value, key));
    else if (key == "eval_rounds") {
      for (const auto& s : split_list(value))
        cfg.eval_rounds.push_back(static_cast<int>(parse_long(s, key)));
    } else if (key == "out") cfg.out = value;
    else if (key == "baselines") {
      for (const auto& s : split_list(value)) cfg.baselines.push_back(baseline_from_name(s));
    } else if (key == "dataset.kind") cfg.dataset.kind = value;
    else if (key == "dataset.classes") cfg.dataset.classes = static_cast<int>(parse_long(value, key));
    else if (key == "dataset.channels") cfg.dataset.channels = parse_long(value, key);
    else if (key == "dataset.height") cfg.dataset.height = parse_long(value, key);
    else if (key == "dataset.width") cfg.dataset.width = parse_long(value, key);
    else if (key == "dataset.train_per_class") cfg.dataset.train_per_class = parse_long(value, key);
    else if (key == "dataset.test_per_class") cfg.dataset.test_per_class = parse_long(value, key);
    else if (key == "dataset.spread") cfg.dataset.spread = parse_double(value, key);
    else if (key == "dataset.ambiguous_fraction") cfg.dataset.ambiguous_fraction = parse_double(value, key);
    else if (key == "dataset.seed") cfg.dataset.seed = static_cast<std::uint64_t>(parse_long(value, key));
    else if (key == "dataset.images") cfg.dataset.images = value;
    else if (key == "dataset.labels") cfg.dataset.labels = value;
    else if (key == "dataset.test_images") cfg.dataset.test_images = value;
    else if (key == "dataset.test_labels") cfg.dataset.test_labels = value;
    else if (key == "dataset.path") cfg.dataset.path = value;
    else if (key == "dataset.test_path") cfg.dataset.test_path = value;
    else if (key == "normalize.mean") {
      cfg.ticket.augment_cfg.mean.clear();
      for (const auto& s : split_list(value))
        cfg.ticket.augment_cfg.mean.push_back(parse_double(s, key));
    } else if (key == "normalize.std") {
      cfg.ticket.augment_cfg.stddev.clear();
      for (const auto& s : split_list(value))
        cfg.ticket.augment_cfg.stddev.push_back(parse_double(s, key));
    } else if (key == "split.val_fraction") cfg.split.val_fraction = parse_double(value, key);
    else if (key == "split.seed") cfg.split.seed = static_cast<std::uint64_t>(parse_long(value, key));
    else if (key == "augment.enabled") cfg.ticket.augment = parse_bool(value, key);
    else if (key == "augment.pad") cfg.ticket.augment_cfg.pad = static_cast<int>(parse_long(value, key));
    else if (key == "augment.random_crop") cfg.ticket.augment_cfg.random_crop = parse_bool(value, key);
    else if (key == "augment.horizontal_flip") cfg.ticket.augment_cfg.horizontal_flip = parse_bool(value, key);
    else if (key == "train.batch_size") cfg.ticket.batch_size = parse_long(value, key);
    else if (key == "train.epochs_per_round") cfg.ticket.epochs_per_round = static_cast<int>(parse_long(value, key));
    else if (key == "train.variant") {
      if (value == "standard") cfg.ticket.lr_variant = LrVariant::Standard;
      else if (value == "low") cfg.ticket.lr_variant = LrVariant::Low;
      else if (value == "warmup") cfg.ticket.lr_variant = LrVariant::Warmup;
      else throw InputError("train.variant must be standard, low or warmup");
    } else if (key == "train.milestone_epochs") {
      cfg.ticket.milestone_epochs.clear();
      for (const auto& s : split_list(value))
        cfg.ticket.milestone_epochs.push_back(parse_long(s, key));
    } else if (key == "train.warmup_epochs") cfg.ticket.warmup_epochs = parse_long(value, key);
    else if (key == "train.momentum") cfg.ticket.momentum = parse_double(value, key);
    else if (key == "train.weight_decay") cfg.ticket.weight_decay = parse_double(value, key);
    else if (key == "ticket.target_sparsity") cfg.ticket.target_sparsity = parse_double(value, key);
    else if (key == "ticket.prune_ratio") cfg.ticket.prune.ratio = parse_double(value, key);
    else if (key == "ticket.layerwise") cfg.ticket.prune.layerwise = parse_bool(value, key);
    else if (key == "ticket.rewind_epoch") cfg.ticket.rewind_epoch = static_cast<int>(parse_long(value, key));
    else if (key == "ticket.forget_threshold") cfg.ticket.selection.forget_threshold = static_cast<std::uint32_t>(parse_long(value, key));
    else if (key == "ticket.include_never_learned") cfg.ticket.selection.include_never_learned = parse_bool(value, key);
    else if (key == "ticket.stats_mode") {
      if (value == "presentation") cfg.ticket.stats_mode = StatsMode::PerPresentation;
      else if (value == "sweep") cfg.ticket.stats_mode = StatsMode::EpochSweep;
      else throw InputError("ticket.stats_mode must be presentation or sweep");
    } else if (key == "ticket.data_slimming") cfg.ticket.data_slimming = parse_bool(value, key);
    else if (key == "ticket.dynamic_iterations") cfg.ticket.dynamic_iterations = parse_bool(value, key);
    else if (key == "ticket.early_stop") cfg.ticket.early_stop.enabled = parse_bool(value, key);
    else if (key == "ticket.early_stop_threshold") cfg.ticket.early_stop.threshold = parse_double(value, key);
    else if (key == "ticket.early_stop_patience") cfg.ticket.early_stop.patience = static_cast<int>(parse_long(value, key));
    else if (key == "ticket.early_stop_fifo") cfg.ticket.early_stop.fifo_window = parse_bool(value, key);
    else throw InputError("unknown config key '" + key + "'");
  }
  if (cfg.seeds.empty()) cfg.seeds = {1, 2, 3};
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_experiment_config(const std::string& path) {
  return parse_experiment_kv(read_config_txt(path));
}

std::vector<std::pair<std::string, std::string>> experiment_config_kv(
    const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> kv;
  auto add = [&kv](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
  add("name", cfg.name);
  add("method", cfg.method);
  add("precision", cfg.precision == Precision::F64 ? "f64" : "f32");
  add("arch", cfg.arch);
  add("seeds", list_str(std::vector<long long>(cfg.seeds.begin(), cfg.seeds.end())));
  add("threads", std::to_string(cfg.threads));
  if (!cfg.eval_rounds.empty()) add("eval_rounds", list_str(cfg.eval_rounds));
  add("out", cfg.out);
  if (!cfg.baselines.empty()) {
    std::string names;
    for (std::size_t i = 0; i < cfg.baselines.size(); ++i) {
      if (i) names += ",";
      names += baseline_name(cfg.baselines[i]);
    }
    add("baselines", names);
  }
  add("dataset.kind", cfg.dataset.kind);
  add("dataset.classes", std::to_string(cfg.dataset.classes));
  add("dataset.channels", std::to_string(cfg.dataset.channels));
  add("dataset.height", std::to_string(cfg.dataset.height));
  add("dataset.width", std::to_string(cfg.dataset.width));
  if (cfg.dataset.kind == "synthetic") {
    add("dataset.train_per_class", std::to_string(cfg.dataset.train_per_class));
    add("dataset.test_per_class", std::to_string(cfg.dataset.test_per_class));
    add("dataset.spread", fmt_double(cfg.dataset.spread, 6));
    add("dataset.ambiguous_fraction", fmt_double(cfg.dataset.ambiguous_fraction, 6));
    add("dataset.seed", std::to_string(cfg.dataset.seed));
  } else if (cfg.dataset.kind == "idx") {
    add("dataset.images", cfg.dataset.images);
    add("dataset.labels", cfg.dataset.labels);
    add("dataset.test_images", cfg.dataset.test_images);
    add("dataset.test_labels", cfg.dataset.test_labels);
  } else {
    add("dataset.path", cfg.dataset.path);
    add("dataset.test_path", cfg.dataset.test_path);
  }
  if (!cfg.ticket.augment_cfg.mean.empty())
    add("normalize.mean", doubles_str(cfg.ticket.augment_cfg.mean));
  if (!cfg.ticket.augment_cfg.stddev.empty())
    add("normalize.std", doubles_str(cfg.ticket.augment_cfg.stddev));
  add("split.val_fraction", fmt_double(cfg.split.val_fraction, 6));
  add("split.seed", std::to_string(cfg.split.seed));
  add("augment.enabled", bool_str(cfg.ticket.augment));
  add("augment.pad", std::to_string(cfg.ticket.augment_cfg.pad));
  add("augment.random_crop", bool_str(cfg.ticket.augment_cfg.random_crop));
  add("augment.horizontal_flip", bool_str(cfg.ticket.augment_cfg.horizontal_flip));
  add("train.batch_size", std::to_string(cfg.ticket.batch_size));
  add("train.epochs_per_round", std::to_string(cfg.ticket.epochs_per_round));
  add("train.variant", cfg.ticket.lr_variant == LrVariant::Standard ? "standard"
                       : cfg.ticket.lr_variant == LrVariant::Low    ? "low"
                                                                    : "warmup");
  add("train.milestone_epochs", list_str(cfg.ticket.milestone_epochs));
  add("train.warmup_epochs", std::to_string(cfg.ticket.warmup_epochs));
  add("train.momentum", fmt_double(cfg.ticket.momentum, 6));
  add("train.weight_decay", fmt_double(cfg.ticket.weight_decay, 8));
  add("ticket.target_sparsity", fmt_double(cfg.ticket.target_sparsity, 6));
  add("ticket.prune_ratio", fmt_double(cfg.ticket.prune.ratio, 6));
  add("ticket.layerwise", bool_str(cfg.ticket.prune.layerwise));
  add("ticket.rewind_epoch", std::to_string(cfg.ticket.rewind_epoch));
  add("ticket.forget_threshold", std::to_string(cfg.ticket.selection.forget_threshold));
  add("ticket.include_never_learned", bool_str(cfg.ticket.selection.include_never_learned));
  add("ticket.stats_mode",
      cfg.ticket.stats_mode == StatsMode::PerPresentation ? "presentation" : "sweep");
  add("ticket.data_slimming", bool_str(cfg.ticket.data_slimming));
  add("ticket.dynamic_iterations", bool_str(cfg.ticket.dynamic_iterations));
  add("ticket.early_stop", bool_str(cfg.ticket.early_stop.enabled));
  add("ticket.early_stop_threshold", fmt_double(cfg.ticket.early_stop.threshold, 6));
  add("ticket.early_stop_patience", std::to_string(cfg.ticket.early_stop.patience));
  add("ticket.early_stop_fifo", bool_str(cfg.ticket.early_stop.fifo_window));
  return kv;
}

DatasetPair build_datasets(const DatasetSpec& spec) {
  DatasetPair out;
  if (spec.kind == "synthetic") {
    SynthSpec s;
    s.classes = spec.classes;
    s.shape = {spec.channels, spec.height, spec.width};
    s.per_class = spec.train_per_class;
    s.spread = spec.spread;
    s.ambiguous_fraction = spec.ambiguous_fraction;
    s.seed = spec.seed;
    out.train = synthesize(s);
    SynthSpec t = s;
    t.per_class = spec.test_per_class;
    t.salt = 1;
    out.test = synthesize(t);
  } else if (spec.kind == "idx") {
    require(!spec.images.empty() && !spec.labels.empty(),
            "idx dataset needs dataset.images and dataset.labels");
    require(!spec.test_images.empty() && !spec.test_labels.empty(),
            "idx dataset needs dataset.test_images and dataset.test_labels");
    out.train = load_idx(spec.images, spec.labels);
    out.test = load_idx(spec.test_images, spec.test_labels);
  } else if (spec.kind == "raw") {
    require(!spec.path.empty() && !spec.test_path.empty(),
            "raw dataset needs dataset.path and dataset.test_path");
    out.train = load_raw_labeled(spec.path, spec.channels, spec.height, spec.width,
                                 spec.classes);
    out.test = load_raw_labeled(spec.test_path, spec.channels, spec.height, spec.width,
                                spec.classes);
  } else {
    throw InputError("unknown dataset kind '" + spec.kind + "'");
  }
  require(out.train.class_count == out.test.class_count,
          "train and test class counts differ");
  return out;
}

}  // namespace prac
