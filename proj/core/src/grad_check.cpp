#include "sidnism/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sidnism::ad {

namespace {

double evaluate(const ScalarFn& f, const Shape& shape, const std::vector<double>& x) {
  Tape tape;
  const Tensor in = tape.constant(shape, x);
  return f(tape, in).item();
}

}  // namespace

GradCheckResult grad_check(const ScalarFn& f, const Shape& shape, std::span<const double> x,
                           double h) {
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> analytic;
  {
    Tape tape;
    const Tensor in = tape.variable(shape, point);
    const Tensor out = f(tape, in);
    tape.backward(out);
    const auto g = in.grad();
    analytic.assign(point.size(), 0.0);
    std::copy(g.begin(), g.end(), analytic.begin());
  }

  GradCheckResult result;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + h;
    const double up = evaluate(f, shape, point);
    point[i] = saved - h;
    const double down = evaluate(f, shape, point);
    point[i] = saved;

    const double numeric = (up - down) / (2.0 * h);
    const double err =
        std::abs(analytic[i] - numeric) / std::max(1e-8, std::abs(analytic[i]) + std::abs(numeric));
    if (i == 0 || err > result.max_rel_error) {
      result = {err, i, analytic[i], numeric};
    }
  }
  return result;
}

}  // namespace sidnism::ad
