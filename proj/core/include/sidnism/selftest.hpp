#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sidnism/image.hpp"
#include "sidnism/sid_config.hpp"

namespace sidnism::selftest {

struct CheckRow {
  std::string name;
  double value = 0.0;      ///< measured error or quantity
  double tolerance = 0.0;  ///< pass when value < tolerance (see `passed`)
  bool passed = false;
};

/// Finite-difference check of every differentiable op on seeded random
/// inputs, plus the full loss in direct mode.
std::vector<CheckRow> gradient_checks(std::uint64_t seed = 7);

/// Max relative error of the full direct-mode loss gradient with respect to
/// all six logit maps, evaluated at seeded random logits. Edge weights are
/// held at their values from the evaluation point.
double total_loss_grad_error(const Image& source, const sid::SidConfig& cfg, std::uint64_t seed);

/// Closed-form properties of the illumination curves.
std::vector<CheckRow> curve_checks(std::uint64_t seed = 11);

/// Identities of the quality metrics.
std::vector<CheckRow> metric_checks(std::uint64_t seed = 13);

/// Runs every suite, prints one line per check; true iff all pass.
bool run_selftest(std::ostream& out);

}  // namespace sidnism::selftest
