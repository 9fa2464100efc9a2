// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#include "prac/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include "prac/baselines.hpp"
#include "prac/csvfmt.hpp"
#include "prac/report.hpp"
#include "prac/rundir.hpp"

namespace prac {

namespace fs = std::filesystem;

const std::vector<std::string> kSummaryColumns = {
    "method",          "seed",
    "round",           "sparsity_pct",
    "prac_size",       "iterations_used",
    "cumulative_iterations", "early_stop_epoch",
    "val_acc",         "test_acc",
};

std::vector<SummaryRow> summary_rows(const std::string& method, std::uint64_t seed,
                                     const RunLog& log) {
  std::vector<SummaryRow> rows;
  long cumulative = 0;
  for (const auto& r : log.rounds) {
    cumulative += r.iterations_used;
    SummaryRow row;
    row.method = method;
    row.seed = seed;
    row.round = r.round;
    row.sparsity_pct = 100.0 * r.sparsity;
    row.prac_size = r.prac_size;
    row.iterations_used = r.iterations_used;
    row.cumulative_iterations = cumulative;
    row.early_stop_epoch = r.early_stop_epoch;
    row.val_acc = r.val_acc_last;
    row.test_acc = r.test_accuracy;
    rows.push_back(row);
  }
  return rows;
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path);
  os << join_csv(kSummaryColumns) << "\n";
  for (const auto& r : rows) {
    os << join_csv({
              r.method,
              std::to_string(r.seed),
              std::to_string(r.round),
              fmt_double(r.sparsity_pct, 4),
              std::to_string(r.prac_size),
              std::to_string(r.iterations_used),
              std::to_string(r.cumulative_iterations),
              std::to_string(r.early_stop_epoch),
              fmt_double(r.val_acc, 6),
              r.test_acc < 0.0 ? std::string() : fmt_double(r.test_acc, 6),
          })
       << "\n";
  }
  if (!os) throw DataError("write failed: " + path);
}

namespace {

std::string run_dir_name(const std::string& method, std::uint64_t seed) {
  return method + "_seed" + std::to_string(seed);
}

std::vector<int> rounds_to_eval(const ExperimentConfig& cfg, int total_rounds) {
  std::vector<int> rounds;
  for (int r : cfg.eval_rounds)
    if (r >= 1 && r <= total_rounds) rounds.push_back(r);
  if (rounds.empty()) rounds.push_back(total_rounds);
  std::sort(rounds.begin(), rounds.end());
  rounds.erase(std::unique(rounds.begin(), rounds.end()), rounds.end());
  return rounds;
}

// Evaluation runs retrain on the identical data order for every method of the
// same seed, so ticket comparisons are paired.
std::uint64_t eval_seed_for(std::uint64_t run_seed, int round) {
  return RngStream(run_seed).derive("eval", static_cast<std::uint64_t>(round)).seed();
}

void write_run_config(const fs::path& dir, const ExperimentConfig& cfg,
                      const std::string& method, std::uint64_t seed) {
  ExperimentConfig copy = cfg;
  copy.method = method;
  copy.seeds = {seed};
  write_config_txt(dir / "config.txt", experiment_config_kv(copy));
}

template <class Scalar>
struct SeedRun {
  std::vector<SummaryRow> rows;
  std::vector<std::string> run_dirs;
};

template <class Scalar>
void evaluate_rounds(const ExperimentConfig& cfg, const NetworkSpec& net,
                     const DatasetPair& data, const Split& split,
                     const TicketRunConfig& ticket_cfg, TicketOutcome<Scalar>& outcome,
                     const std::vector<int>& rounds, std::uint64_t run_seed) {
  for (int r : rounds) {
    const EvalOutcome eval = evaluate_ticket(
        net, data.train, split.train, split.val, data.test,
        outcome.round_masks[static_cast<std::size_t>(r - 1)], outcome.rewind_snapshot,
        ticket_cfg, eval_seed_for(run_seed, r));
    outcome.log.rounds[static_cast<std::size_t>(r - 1)].test_accuracy = eval.test_accuracy;
  }
}

template <class Scalar>
void persist_method_run(const ExperimentConfig& cfg, const std::string& method,
                        std::uint64_t seed, const fs::path& out_root,
                        const TicketOutcome<Scalar>& outcome, const Dataset& train,
                        SeedRun<Scalar>& result) {
  const fs::path dir = out_root / run_dir_name(method, seed);
  persist_run(dir.string(), outcome, &train);
  write_run_config(dir, cfg, method, seed);
  const auto rows = summary_rows(method, seed, outcome.log);
  write_summary_csv((dir / "summary.csv").string(), rows);
  result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  result.run_dirs.push_back(dir.string());
}

template <class Scalar>
SeedRun<Scalar> run_seed_jobs(const ExperimentConfig& cfg, const DatasetPair& data,
                              const Split& split, const NetworkSpec& net,
                              std::uint64_t seed) {
  SeedRun<Scalar> result;
  TicketRunConfig ticket_cfg = cfg.ticket;
  ticket_cfg.seed = seed;

  // the data-slimmed search first; its budgets anchor the matched baselines
  TicketOutcome<Scalar> prac = find_ticket<Scalar>(net, data.train, split.train, split.val,
                                                   ticket_cfg);
  const int total_rounds = static_cast<int>(prac.log.rounds.size());
  const std::vector<int> eval_at = rounds_to_eval(cfg, total_rounds);
  evaluate_rounds(cfg, net, data, split, ticket_cfg, prac, eval_at, seed);
  persist_method_run(cfg, "prac", seed, cfg.out, prac, data.train, result);
  const BudgetMatch match = BudgetMatch::from_log(prac.log);

  for (BaselineKind kind : cfg.baselines) {
    const std::string method = baseline_name(kind);
    switch (kind) {
      case BaselineKind::VanillaLt: {
        TicketOutcome<Scalar> run =
            vanilla_lt<Scalar>(net, data.train, split.train, split.val, ticket_cfg);
        evaluate_rounds(cfg, net, data, split, ticket_cfg, run, eval_at, seed);
        persist_method_run(cfg, method, seed, cfg.out, run, data.train, result);
        break;
      }
      case BaselineKind::RandomPrune: {
        TicketOutcome<Scalar> run;
        run.theta0 = prac.theta0;
        run.rewind_snapshot = prac.rewind_snapshot;
        run.log.n0 = prac.log.n0;
        run.log.d0 = prac.log.d0;
        RngStream rng = RngStream(seed).derive("random-prune");
        SparseMask parent = dense_mask(prac.theta0);
        for (std::size_t k = 0; k < prac.round_masks.size(); ++k) {
          parent = random_prune_within(parent, prac.round_masks[k], rng);
          run.round_masks.push_back(parent);
          run.round_pracs.emplace_back();
          run.round_histograms.emplace_back();
          RoundLog rl;
          rl.round = static_cast<int>(k) + 1;
          rl.sparsity = sparsity(parent);
          rl.nesting_ok = true;
          run.log.rounds.push_back(rl);
        }
        run.mask = parent;
        evaluate_rounds(cfg, net, data, split, ticket_cfg, run, eval_at, seed);
        persist_method_run(cfg, method, seed, cfg.out, run, data.train, result);
        break;
      }
      case BaselineKind::RandomTicket: {
        // the found masks applied to fresh weights
        TicketOutcome<Scalar> run;
        run.round_masks = prac.round_masks;
        run.round_pracs.assign(prac.round_masks.size(), {});
        run.round_histograms.assign(prac.round_masks.size(), {});
        run.log.n0 = prac.log.n0;
        run.log.d0 = prac.log.d0;
        for (std::size_t k = 0; k < prac.round_masks.size(); ++k) {
          RoundLog rl;
          rl.round = static_cast<int>(k) + 1;
          rl.sparsity = sparsity(prac.round_masks[k]);
          run.log.rounds.push_back(rl);
        }
        run.mask = prac.mask;
        ParameterSet<Scalar> reinit;
        for (int r : eval_at) {
          reinit = random_ticket<Scalar>(
              net, prac.round_masks[static_cast<std::size_t>(r - 1)],
              RngStream(seed).derive("reinit", static_cast<std::uint64_t>(r)).seed());
          const EvalOutcome eval = evaluate_ticket(
              net, data.train, split.train, split.val, data.test,
              prac.round_masks[static_cast<std::size_t>(r - 1)], reinit, ticket_cfg,
              eval_seed_for(seed, r));
          run.log.rounds[static_cast<std::size_t>(r - 1)].test_accuracy =
              eval.test_accuracy;
        }
        run.theta0 = reinit.entries.empty() ? prac.theta0 : reinit;
        run.rewind_snapshot = run.theta0;
        persist_method_run(cfg, method, seed, cfg.out, run, data.train, result);
        break;
      }
      case BaselineKind::RandomSubset:
      case BaselineKind::EntropySubset: {
        const SubsetKind sk = kind == BaselineKind::RandomSubset ? SubsetKind::Random
                                                                 : SubsetKind::Entropy;
        TicketOutcome<Scalar> run =
            subset_lt<Scalar>(sk, net, data.train, split.train, split.val, ticket_cfg, match);
        evaluate_rounds(cfg, net, data, split, ticket_cfg, run, eval_at, seed);
        persist_method_run(cfg, method, seed, cfg.out, run, data.train, result);
        break;
      }
      case BaselineKind::SnipIterative: {
        TicketOutcome<Scalar> run = snip_iterative<Scalar>(net, data.train, split.train,
                                                           split.val, ticket_cfg, match);
        evaluate_rounds(cfg, net, data, split, ticket_cfg, run, eval_at, seed);
        persist_method_run(cfg, method, seed, cfg.out, run, data.train, result);
        break;
      }
    }
  }
  return result;
}

template <class Scalar>
void run_experiment_impl(const ExperimentConfig& cfg) {
  cfg.validate();
  const DatasetPair data = build_datasets(cfg.dataset);
  const Split split = split_dataset(data.train, cfg.split);
  const NetworkSpec net =
      make_network(cfg.arch, data.train.sample_shape(), data.train.class_count);

  fs::create_directories(cfg.out);
  write_config_txt(fs::path(cfg.out) / "config.txt", experiment_config_kv(cfg));

  const std::size_t n = cfg.seeds.size();
  std::vector<SeedRun<Scalar>> per_seed(n);
  std::vector<double> wall_seconds(n, 0.0);
  std::vector<std::exception_ptr> errors(n);

  // seeds run concurrently; each owns its parameters and run directories and
  // shares only the immutable datasets
  const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(cfg.threads));
  for (std::size_t wave = 0; wave < n; wave += stride) {
    std::vector<std::thread> workers;
    for (std::size_t i = wave; i < std::min(n, wave + stride); ++i) {
      workers.emplace_back([&, i]() {
        const auto start = std::chrono::steady_clock::now();
        try {
          per_seed[i] = run_seed_jobs<Scalar>(cfg, data, split, net, cfg.seeds[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
        wall_seconds[i] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      });
    }
    for (auto& w : workers) w.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<SummaryRow> rows;
  std::vector<std::string> run_dirs;
  for (const auto& sr : per_seed) {
    rows.insert(rows.end(), sr.rows.begin(), sr.rows.end());
    run_dirs.insert(run_dirs.end(), sr.run_dirs.begin(), sr.run_dirs.end());
  }
  // stable order: method within seed is already fixed; order seeds as configured
  write_summary_csv((fs::path(cfg.out) / "summary.csv").string(), rows);

  {
    std::ofstream os(fs::path(cfg.out) / "timings.csv", std::ios::trunc);
    os << "seed,wall_time_seconds\n";
    for (std::size_t i = 0; i < n; ++i)
      os << cfg.seeds[i] << "," << fmt_double(wall_seconds[i], 3) << "\n";
  }

  write_report(run_dirs, (fs::path(cfg.out) / "report").string());
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg) {
  if (cfg.precision == Precision::F32)
    run_experiment_impl<float>(cfg);
  else
    run_experiment_impl<double>(cfg);
}

namespace {

template <class Scalar>
void run_transfer_impl(const ExperimentConfig& source_cfg, const std::string& source_dir,
                       const std::string& target_arch, const std::string& out_dir,
                       std::uint64_t seed) {
  const DatasetPair data = build_datasets(source_cfg.dataset);
  const Split split = split_dataset(data.train, source_cfg.split);
  const NetworkSpec net =
      make_network(target_arch, data.train.sample_shape(), data.train.class_count);

  // collect the source's per-round training sets
  const RunDirPaths source(source_dir);
  std::vector<PracSet> sets;
  for (int round = 1; fs::exists(source.prac_path(round)); ++round)
    sets.push_back(load_prac(source.prac_path(round).string()));
  require(!sets.empty(), "no prac.txt files under " + source_dir);

  TicketRunConfig ticket_cfg = source_cfg.ticket;
  ticket_cfg.seed = seed;
  TicketOutcome<Scalar> run = find_ticket_transferred<Scalar>(
      net, data.train, split.train, split.val, ticket_cfg, sets);

  ExperimentConfig cfg = source_cfg;
  cfg.arch = target_arch;
  cfg.out = out_dir;
  const int total_rounds = static_cast<int>(run.log.rounds.size());
  const std::vector<int> eval_at = rounds_to_eval(cfg, total_rounds);
  evaluate_rounds(cfg, net, data, split, ticket_cfg, run, eval_at, seed);

  fs::create_directories(out_dir);
  SeedRun<Scalar> result;
  persist_method_run(cfg, "transfer-" + target_arch, seed, out_dir, run, data.train, result);
  write_summary_csv((fs::path(out_dir) / "summary.csv").string(), result.rows);
  write_report(result.run_dirs, (fs::path(out_dir) / "report").string());
}

}  // namespace

void run_transfer(const std::string& source_run_dir, const std::string& target_arch,
                  const std::string& out_dir, long seed_override) {
  const ExperimentConfig source_cfg =
      parse_experiment_config((fs::path(source_run_dir) / "config.txt").string());
  const std::uint64_t seed = seed_override >= 0 ? static_cast<std::uint64_t>(seed_override)
                                                : source_cfg.seeds.front();
  if (source_cfg.precision == Precision::F32)
    run_transfer_impl<float>(source_cfg, source_run_dir, target_arch, out_dir, seed);
  else
    run_transfer_impl<double>(source_cfg, source_run_dir, target_arch, out_dir, seed);
}

}  // namespace prac
