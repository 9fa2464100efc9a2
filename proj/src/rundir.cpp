// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#include "prac/rundir.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "prac/csvfmt.hpp"
#include "prac/error.hpp"

namespace prac {

namespace fs = std::filesystem;

const std::vector<std::string> kRoundsCsvColumns = {
    "round",           "sparsity_pct",   "cet_size",       "cep_size",
    "prac_size",       "overlap_rate",   "train_set_size", "budget",
    "budget_formula",  "iterations_used", "epochs_run",    "early_stop_epoch",
    "val_acc",         "test_acc",       "n0",             "d0",
};

namespace {

std::ofstream open_text(const fs::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path.string());
  return os;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void write_rounds_csv(const fs::path& path, const RunLog& log) {
  auto os = open_text(path);
  os << join_csv(kRoundsCsvColumns) << "\n";
  for (const auto& r : log.rounds) {
    os << join_csv({
              std::to_string(r.round),
              fmt_double(100.0 * r.sparsity, 4),
              std::to_string(r.cet_size),
              std::to_string(r.cep_size),
              std::to_string(r.prac_size),
              fmt_double(r.overlap_rate, 6),
              std::to_string(r.train_set_size),
              std::to_string(r.budget),
              std::to_string(r.budget_formula),
              std::to_string(r.iterations_used),
              std::to_string(r.epochs_run),
              std::to_string(r.early_stop_epoch),
              fmt_double(r.val_acc_last, 6),
              fmt_double(r.test_accuracy, 6),
              std::to_string(log.n0),
              std::to_string(log.d0),
          })
       << "\n";
  }
  if (!os) throw DataError("write failed: " + path.string());
}

RunLog load_rounds_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw DataError("empty rounds file: " + path.string());
  if (split_csv_line(trim(line)) != kRoundsCsvColumns)
    throw DataError("unexpected rounds.csv header in " + path.string());
  RunLog log;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(trim(line));
    if (cells.size() != kRoundsCsvColumns.size())
      throw DataError("malformed rounds.csv row in " + path.string());
    RoundLog r;
    try {
      r.round = std::stoi(cells[0]);
      r.sparsity = std::stod(cells[1]) / 100.0;
      r.cet_size = std::stoull(cells[2]);
      r.cep_size = std::stoull(cells[3]);
      r.prac_size = std::stoull(cells[4]);
      r.overlap_rate = std::stod(cells[5]);
      r.train_set_size = std::stoull(cells[6]);
      r.budget = std::stol(cells[7]);
      r.budget_formula = std::stol(cells[8]);
      r.iterations_used = std::stol(cells[9]);
      r.epochs_run = std::stoi(cells[10]);
      r.early_stop_epoch = std::stoi(cells[11]);
      r.val_acc_last = std::stod(cells[12]);
      r.test_accuracy = std::stod(cells[13]);
      log.n0 = std::stol(cells[14]);
      log.d0 = std::stoull(cells[15]);
    } catch (const std::exception&) {
      throw DataError("unparseable rounds.csv row in " + path.string());
    }
    log.rounds.push_back(std::move(r));
  }
  return log;
}

void write_epoch_log_csv(const fs::path& path, const RoundLog& round) {
  auto os = open_text(path);
  os << "epoch,iterations,mean_loss,val_accuracy,candidate_distance\n";
  for (std::size_t e = 0; e < round.epochs.size(); ++e) {
    const auto& rec = round.epochs[e];
    // the first epoch has no predecessor mask, so no distance
    const std::string dist =
        e >= 1 && e - 1 < round.candidate_distances.size()
            ? fmt_double(round.candidate_distances[e - 1], 6)
            : "";
    os << rec.epoch << "," << rec.iterations << "," << fmt_double(rec.mean_loss, 6) << ","
       << fmt_double(rec.val_accuracy, 6) << "," << dist << "\n";
  }
}

void write_forgetting_csv(const fs::path& path, const ForgettingHistogram& hist) {
  auto os = open_text(path);
  os << "bin,count\n";
  for (const auto& [count, n] : hist.bins) os << count << "," << n << "\n";
  os << "never," << hist.never_learned << "\n";
}

void write_class_hist_csv(const fs::path& path, const std::vector<std::size_t>& counts) {
  auto os = open_text(path);
  os << "class,count\n";
  for (std::size_t c = 0; c < counts.size(); ++c) os << c << "," << counts[c] << "\n";
}

void write_config_txt(const fs::path& path,
                      const std::vector<std::pair<std::string, std::string>>& kv) {
  auto os = open_text(path);
  for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
}

std::vector<std::pair<std::string, std::string>> read_config_txt(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open for reading: " + path.string());
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw DataError("malformed config line '" + t + "' in " + path.string());
    kv.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return kv;
}

VerifyReport verify_run_dir(const std::string& dir) {
  VerifyReport report;
  const RunDirPaths paths(dir);
  if (!fs::exists(paths.rounds_csv())) {
    report.fail("missing rounds.csv in " + dir);
    return report;
  }
  RunLog log;
  try {
    log = load_rounds_csv(paths.rounds_csv());
  } catch (const Error& e) {
    report.fail(e.what());
    return report;
  }
  if (log.rounds.empty()) report.fail("rounds.csv lists no rounds");

  SparseMask prev;
  bool have_prev = false;
  for (const auto& r : log.rounds) {
    const std::string at = "round " + std::to_string(r.round);
    SparseMask mask;
    try {
      mask = load_mask(paths.mask_path(r.round).string());
    } catch (const Error& e) {
      report.fail(at + ": " + e.what());
      continue;
    }
    const double recomputed = sparsity(mask);
    if (std::abs(recomputed - r.sparsity) > 5e-5)
      report.fail(at + ": recomputed sparsity " + fmt_double(100.0 * recomputed, 4) +
                  "% does not match the logged " + fmt_double(100.0 * r.sparsity, 4) + "%");
    if (have_prev && !is_subset(mask, prev))
      report.fail(at + ": mask is not nested in the previous round");
    prev = std::move(mask);
    have_prev = true;

    if (fs::exists(paths.prac_path(r.round))) {
      try {
        const PracSet set = load_prac(paths.prac_path(r.round).string());
        if (set.indices.size() != r.prac_size)
          report.fail(at + ": prac.txt size does not match rounds.csv");
        const std::size_t uni = set.indices.size();
        if (uni > set.cet_size + set.cep_size ||
            uni < std::max(set.cet_size, set.cep_size))
          report.fail(at + ": |CET|, |CEP| and |PrAC| violate the union bounds");
        const std::size_t overlap = set.cet_size + set.cep_size - uni;
        if (overlap > std::min(set.cet_size, set.cep_size))
          report.fail(at + ": implied overlap exceeds the smaller set");
      } catch (const Error& e) {
        report.fail(at + ": " + e.what());
      }
    }
    if (r.budget < r.iterations_used)
      report.fail(at + ": iterations exceed the granted budget");
  }
  if (fs::exists(paths.rewind_path())) {
    try {
      (void)load_checkpoint<double>(paths.rewind_path().string());
    } catch (const Error& e) {
      report.fail(std::string("rewind snapshot: ") + e.what());
    }
  } else {
    report.fail("missing rewind snapshot round_1/rewind.bin");
  }
  return report;
}

}  // namespace prac
