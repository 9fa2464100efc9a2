// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#include "prac/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "prac/csvfmt.hpp"
#include "prac/error.hpp"
#include "prac/mask.hpp"
#include "prac/rundir.hpp"

namespace prac {

namespace fs = std::filesystem;

namespace {

struct LoadedRun {
  std::string name;
  RunLog log;
  std::vector<SparseMask> masks;
  RunDirPaths paths;
};

LoadedRun load_run(const std::string& dir) {
  LoadedRun run{fs::path(dir).filename().string(), {}, {}, RunDirPaths(dir)};
  run.log = load_rounds_csv(run.paths.rounds_csv());
  for (const auto& r : run.log.rounds)
    run.masks.push_back(load_mask(run.paths.mask_path(r.round).string()));
  return run;
}

std::ofstream open_text(const fs::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path.string());
  return os;
}

const char* kPalette[] = {"#1f6feb", "#2da44e", "#fb8500", "#cf222e",
                          "#8250df", "#656d76", "#bf8700", "#0a7ea4"};

std::string copy_line(const fs::path& src_csv, std::ofstream& os, const std::string& run,
                      int round) {
  std::ifstream is(src_csv);
  if (!is) return "";
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    os << run << "," << round << "," << line << "\n";
  }
  return line;
}

}  // namespace

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series) {
  const double width = 760, height = 480;
  const double ml = 70, mr = 180, mt = 50, mb = 55;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1;
  if (ymax - ymin < 1e-12) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // frame and ticks
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / ticks;
    const double fy = ymin + (ymax - ymin) * i / ticks;
    svg << "<line x1=\"" << sx(fx) << "\" y1=\"" << mt + ph << "\" x2=\"" << sx(fx)
        << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << sx(fx) << "\" y=\"" << mt + ph + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_double(fx, 2) << "</text>\n";
    svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << ml << "\" y2=\""
        << sy(fy) << "\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << ml - 9 << "\" y=\"" << sy(fy) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_double(fy, 2) << "</text>\n";
  }
  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
      << "</text>\n";
  svg << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << mt + ph / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const std::string color =
        s.color.empty() ? kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))] : s.color;
    std::ostringstream pts;
    for (const auto& [x, y] : s.points) pts << sx(x) << "," << sy(y) << " ";
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
        << pts.str() << "\"/>\n";
    for (const auto& [x, y] : s.points)
      svg << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    const double ly = mt + 16 + 18 * static_cast<double>(si);
    svg << "<line x1=\"" << ml + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << ml + pw + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << ml + pw + 40 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.name << "</text>\n";
  }
  svg << "</svg>\n";

  auto os = open_text(path);
  os << svg.str();
}

void write_report(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
  require(!run_dirs.empty(), "report needs at least one run directory");
  fs::create_directories(out_dir);
  std::vector<LoadedRun> runs;
  for (const auto& dir : run_dirs) runs.push_back(load_run(dir));

  // accuracy vs sparsity
  {
    auto os = open_text(fs::path(out_dir) / "accuracy_vs_sparsity.csv");
    os << "run,round,sparsity_pct,test_acc\n";
    std::vector<SvgSeries> series;
    for (const auto& run : runs) {
      SvgSeries s;
      s.name = run.name;
      for (const auto& r : run.log.rounds) {
        if (r.test_accuracy < 0.0) continue;  // round was not evaluated
        os << run.name << "," << r.round << "," << fmt_double(100.0 * r.sparsity, 4) << ","
           << fmt_double(r.test_accuracy, 6) << "\n";
        s.points.emplace_back(100.0 * r.sparsity, 100.0 * r.test_accuracy);
      }
      if (!s.points.empty()) series.push_back(std::move(s));
    }
    write_svg_chart((fs::path(out_dir) / "accuracy_vs_sparsity.svg").string(),
                    "Ticket accuracy across sparsity levels", "sparsity (%)",
                    "test accuracy (%)", series);
  }

  // pairwise mask distances within each run
  {
    auto os = open_text(fs::path(out_dir) / "mask_distance.csv");
    os << "run,round_a,round_b,normalized_distance\n";
    for (const auto& run : runs)
      for (std::size_t a = 0; a < run.masks.size(); ++a)
        for (std::size_t b = 0; b < run.masks.size(); ++b)
          os << run.name << "," << run.log.rounds[a].round << "," << run.log.rounds[b].round
             << "," << fmt_double(hamming(run.masks[a], run.masks[b]).normalized, 6) << "\n";
  }

  // same-round similarity across run pairs
  {
    auto os = open_text(fs::path(out_dir) / "relative_similarity.csv");
    os << "run_a,run_b,round,relative_similarity\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      for (std::size_t j = i + 1; j < runs.size(); ++j) {
        const std::size_t rounds = std::min(runs[i].masks.size(), runs[j].masks.size());
        for (std::size_t k = 0; k < rounds; ++k) {
          if (!runs[i].masks[k].same_alignment(runs[j].masks[k])) continue;
          os << runs[i].name << "," << runs[j].name << "," << runs[i].log.rounds[k].round
             << ","
             << fmt_double(relative_similarity(runs[i].masks[k], runs[j].masks[k]), 6)
             << "\n";
        }
      }
    }
  }

  // per-round forgetting histograms and class balance, copied through
  {
    auto os = open_text(fs::path(out_dir) / "forgetting_hist.csv");
    os << "run,round,bin,count\n";
    for (const auto& run : runs)
      for (const auto& r : run.log.rounds)
        copy_line(run.paths.forgetting_path(r.round), os, run.name, r.round);
  }
  {
    auto os = open_text(fs::path(out_dir) / "prac_class_ratio.csv");
    os << "run,round,class,count\n";
    for (const auto& run : runs)
      for (const auto& r : run.log.rounds)
        copy_line(run.paths.class_hist_path(r.round), os, run.name, r.round);
  }
}

}  // namespace prac
