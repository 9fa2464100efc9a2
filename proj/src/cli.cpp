// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#include "prac/cli.hpp"

#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "prac/error.hpp"
#include "prac/experiment.hpp"
#include "prac/report.hpp"
#include "prac/rundir.hpp"

namespace prac {

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"lottery-ticket finding on pruning-aware critical subsets"};
  app.require_subcommand(1);

  std::string config_path, out_dir, from_dir, arch;
  long seed = -1;
  int threads = 0;
  std::vector<std::string> dirs;

  auto* cmd_run = app.add_subcommand("run", "run an experiment from a config file");
  cmd_run->add_option("config", config_path, "flat key = value configuration file")
      ->required();
  cmd_run->add_option("--seed", seed, "run a single seed instead of the configured list");
  cmd_run->add_option("--out", out_dir, "override the output directory");
  cmd_run->add_option("--threads", threads, "concurrent runs");

  auto* cmd_transfer =
      app.add_subcommand("transfer", "rerun the loop on another architecture with "
                                     "the training subsets of a finished run");
  cmd_transfer->add_option("--from", from_dir, "source run directory")->required();
  cmd_transfer->add_option("--arch", arch, "target architecture (mlp or cnn)")->required();
  cmd_transfer->add_option("--out", out_dir, "output directory");
  cmd_transfer->add_option("--seed", seed, "seed override");

  auto* cmd_report = app.add_subcommand("report", "aggregate run directories into CSV/SVG");
  cmd_report->add_option("dirs", dirs, "run directories")->required();
  cmd_report->add_option("--out", out_dir, "report output directory");

  auto* cmd_verify =
      app.add_subcommand("verify", "recheck invariants over persisted artifacts");
  cmd_verify->add_option("dirs", dirs, "run directories")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (cmd_run->parsed()) {
      ExperimentConfig cfg = parse_experiment_config(config_path);
      if (seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(seed)};
      if (!out_dir.empty()) cfg.out = out_dir;
      if (threads > 0) cfg.threads = threads;
      run_experiment(cfg);
      out << "experiment written to " << cfg.out << "\n";
    } else if (cmd_transfer->parsed()) {
      const std::string target = out_dir.empty() ? from_dir + "_transfer_" + arch : out_dir;
      run_transfer(from_dir, arch, target, seed);
      out << "transfer written to " << target << "\n";
    } else if (cmd_report->parsed()) {
      const std::string target = out_dir.empty() ? "report" : out_dir;
      write_report(dirs, target);
      out << "report written to " << target << "\n";
    } else if (cmd_verify->parsed()) {
      bool all_ok = true;
      for (const auto& dir : dirs) {
        const VerifyReport report = verify_run_dir(dir);
        if (report.ok) {
          out << dir << ": ok\n";
        } else {
          all_ok = false;
          for (const auto& p : report.problems) err << dir << ": " << p << "\n";
        }
      }
      if (!all_ok) return 2;
    }
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace prac
