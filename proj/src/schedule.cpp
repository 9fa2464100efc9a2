// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#include "prac/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "prac/error.hpp"

namespace prac {

void validate_schedule(const LrSchedule& s) {
  require(s.total_iterations > 0, "schedule needs a positive horizon");
  require(s.warmup_iterations >= 0, "negative warmup");
  long prev = -1;
  for (long m : s.milestones) {
    require(m > prev, "milestones must be strictly increasing");
    require(m < s.total_iterations, "milestone beyond the schedule horizon");
    prev = m;
  }
  if (!s.milestones.empty())
    require(s.warmup_iterations < s.milestones.front(), "warmup overlaps first milestone");
}

double lr_at(const LrSchedule& s, long iteration) {
  require(iteration >= 0 && iteration < s.total_iterations,
          "iteration outside schedule horizon");
  if (iteration < s.warmup_iterations)
    return s.base_lr * static_cast<double>(iteration + 1) /
           static_cast<double>(s.warmup_iterations);
  int passed = 0;
  for (long m : s.milestones)
    if (m <= iteration) ++passed;
  return s.base_lr * std::pow(s.decay_factor, passed);
}

LrSchedule rescale_schedule(const LrSchedule& s, double ratio) {
  require(ratio > 0.0 && ratio <= 1.0, "rescale ratio must be in (0, 1]");
  LrSchedule out = s;
  out.total_iterations =
      std::max<long>(1, static_cast<long>(std::floor(static_cast<double>(s.total_iterations) * ratio)));
  out.warmup_iterations =
      s.warmup_iterations == 0
          ? 0
          : std::max<long>(1, static_cast<long>(std::floor(
                                  static_cast<double>(s.warmup_iterations) * ratio)));
  out.milestones.clear();
  long prev = out.warmup_iterations;  // milestones stay strictly above warmup
  for (long m : s.milestones) {
    long scaled =
        std::max<long>(1, static_cast<long>(std::floor(static_cast<double>(m) * ratio)));
    scaled = std::max(scaled, prev + 1);
    out.milestones.push_back(scaled);
    prev = scaled;
  }
  if (!out.milestones.empty())
    out.total_iterations = std::max(out.total_iterations, out.milestones.back() + 1);
  out.total_iterations = std::max(out.total_iterations, out.warmup_iterations + 1);
  validate_schedule(out);
  return out;
}

LrSchedule make_schedule(LrVariant variant, long iterations_per_epoch, long total_epochs,
                         const std::vector<long>& milestone_epochs, long warmup_epochs) {
  require(iterations_per_epoch > 0 && total_epochs > 0, "empty schedule");
  LrSchedule s;
  s.total_iterations = iterations_per_epoch * total_epochs;
  switch (variant) {
    case LrVariant::Standard:
      s.base_lr = 0.1;
      break;
    case LrVariant::Low:
      s.base_lr = 0.01;
      break;
    case LrVariant::Warmup:
      s.base_lr = 0.03;
      s.warmup_iterations = warmup_epochs * iterations_per_epoch;
      break;
  }
  for (long e : milestone_epochs) s.milestones.push_back(e * iterations_per_epoch);
  validate_schedule(s);
  return s;
}

}  // namespace prac
