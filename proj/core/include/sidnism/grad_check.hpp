#pragma once

#include <functional>
#include <span>

#include "sidnism/tape.hpp"

namespace sidnism::ad {

/// Scalar function under test; builds its graph on the given tape.
using ScalarFn = std::function<Tensor(Tape&, const Tensor& x)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;  // at worst_index
  double numeric = 0.0;
};

/// Compares reverse-mode gradients with central differences of step `h`.
/// Relative error per component: |a - c| / max(1e-8, |a| + |c|).
GradCheckResult grad_check(const ScalarFn& f, const Shape& shape, std::span<const double> x,
                           double h = 1e-4);

}  // namespace sidnism::ad
