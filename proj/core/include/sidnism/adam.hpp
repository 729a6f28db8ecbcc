#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sidnism/tape.hpp"

namespace sidnism::ad {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Moment buffers are zero-initialized on the first step; `step` counts
/// completed updates.
struct AdamState {
  AdamOptions options;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::int64_t step = 0;
};

/// One bias-corrected Adam update of every parameter from its `grad`.
/// Gradients are left untouched; callers zero them between iterations.
void adam_step(std::span<Parameter* const> params, AdamState& state);

}  // namespace sidnism::ad
