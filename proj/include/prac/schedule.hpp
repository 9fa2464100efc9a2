// Copyright 2026 prackit authors
// Licensed under the Apache License, Version 2.0

#ifndef PRAC_SCHEDULE_HPP
#define PRAC_SCHEDULE_HPP

#include <cstdint>
#include <vector>

namespace prac {

// Multi-step decay with optional linear warmup, indexed by training iteration.
struct LrSchedule {
  double base_lr = 0.1;
  std::vector<long> milestones;  // strictly increasing, < total_iterations
  double decay_factor = 0.1;
  long warmup_iterations = 0;
  long total_iterations = 1;
};

void validate_schedule(const LrSchedule& s);

// During warmup: base_lr * (iteration+1)/warmup. Afterwards:
// base_lr * decay^(milestones passed).
double lr_at(const LrSchedule& s, long iteration);

// Shrink a schedule to a fraction of its horizon: total, milestones and
// warmup all scale by `ratio` (floored, min 1), keeping strict ordering.
LrSchedule rescale_schedule(const LrSchedule& s, double ratio);

// The three training variants: standard (lr 0.1), low (lr 0.01) and warmup
// (lr 0.03 with a linear ramp over `warmup_epochs`).
enum class LrVariant { Standard, Low, Warmup };

LrSchedule make_schedule(LrVariant variant, long iterations_per_epoch, long total_epochs,
                         const std::vector<long>& milestone_epochs, long warmup_epochs = 15);

}  // namespace prac

#endif  // PRAC_SCHEDULE_HPP
