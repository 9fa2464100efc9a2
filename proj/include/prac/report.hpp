// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_REPORT_HPP
#define PRAC_REPORT_HPP

#include <string>
#include <vector>

namespace prac {

// Aggregates persisted run directories into analysis files under out_dir:
//   accuracy_vs_sparsity.csv / .svg   evaluated accuracy per sparsity level
//   mask_distance.csv                 pairwise round-mask Hamming matrix per run
//   relative_similarity.csv           same-round mask similarity across runs
//   forgetting_hist.csv               forget-count histograms per round
//   prac_class_ratio.csv              class balance of the selected subsets
// The SVG is static markup; every number in it comes from the CSVs.
void write_report(const std::vector<std::string>& run_dirs, const std::string& out_dir);

struct SvgSeries {
  std::string name;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series);

}  // namespace prac

#endif  // PRAC_REPORT_HPP
