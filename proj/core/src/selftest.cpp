#include "sidnism/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "sidnism/grad_check.hpp"
#include "sidnism/image_ops.hpp"
#include "sidnism/losses.hpp"
#include "sidnism/metrics.hpp"
#include "sidnism/model.hpp"
#include "sidnism/nism.hpp"
#include "sidnism/ops.hpp"

namespace sidnism::selftest {

using ad::Shape;
using ad::Tape;
using ad::Tensor;

namespace {

constexpr double kOpTolerance = 1e-4;
constexpr double kLossTolerance = 1e-3;

using UnaryOp = std::function<Tensor(const Tensor&)>;
using BinaryOp = std::function<Tensor(const Tensor&, const Tensor&)>;

std::vector<double> uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

// Magnitudes in [0.1, 1] with random sign: clear of kinks and poles.
std::vector<double> away_from_zero(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> v = uniform(rng, n, 0.1, 1.0);
  std::bernoulli_distribution flip(0.5);
  for (double& x : v) {
    if (flip(rng)) x = -x;
  }
  return v;
}

CheckRow below(std::string name, double value, double tolerance) {
  return {std::move(name), value, tolerance, value < tolerance};
}

// sum(op(x) * w) for fixed random w, so every output element matters.
double check_unary(std::mt19937_64& rng, const Shape& shape, const std::vector<double>& x,
                   const UnaryOp& op) {
  Shape out_shape;
  {
    Tape probe;
    out_shape = op(probe.constant(shape, x)).shape();
  }
  const std::vector<double> w = uniform(rng, ad::numel(out_shape), -1.0, 1.0);
  const ad::ScalarFn f = [&](Tape& tape, const Tensor& in) {
    return ad::sum(op(in) * tape.constant(out_shape, w));
  };
  return ad::grad_check(f, shape, x).max_rel_error;
}

// x on either side, at full shape and as a broadcast [1,H,W] operand.
double check_binary(std::mt19937_64& rng, const BinaryOp& op) {
  const Shape full{3, 4, 5};
  const Shape plane{1, 4, 5};
  const std::vector<double> partner_full = away_from_zero(rng, ad::numel(full));
  const std::vector<double> partner_plane = away_from_zero(rng, ad::numel(plane));
  const std::vector<double> x_full = away_from_zero(rng, ad::numel(full));
  const std::vector<double> x_plane = away_from_zero(rng, ad::numel(plane));

  double err = 0.0;
  err = std::max(err, check_unary(rng, full, x_full, [&](const Tensor& x) {
    return op(x, x.tape().constant(full, partner_full));
  }));
  err = std::max(err, check_unary(rng, full, x_full, [&](const Tensor& x) {
    return op(x.tape().constant(full, partner_full), x);
  }));
  err = std::max(err, check_unary(rng, full, x_full, [&](const Tensor& x) {
    return op(x, x.tape().constant(plane, partner_plane));
  }));
  err = std::max(err, check_unary(rng, plane, x_plane, [&](const Tensor& x) {
    return op(x.tape().constant(full, partner_full), x);
  }));
  return err;
}

double check_reduce(const Shape& shape, const std::vector<double>& x, const UnaryOp& op) {
  const ad::ScalarFn f = [&](Tape&, const Tensor& in) { return op(in); };
  return ad::grad_check(f, shape, x).max_rel_error;
}

}  // namespace

double total_loss_grad_error(const Image& source, const sid::SidConfig& cfg, std::uint64_t seed) {
  const std::size_t h = source.height();
  const std::size_t w = source.width();
  const sid::SourceTargets low_t = sid::make_targets(source, cfg.epsilon);
  const sid::SourceTargets he_t = sid::make_targets(hist_equalize(source), cfg.epsilon);

  // Channel layout of x: R_low(3) L_low(1) N_low(3) R_he(3) L_he(1) N_he(3).
  const Shape shape{14, h, w};
  auto split = [](const Tensor& x) {
    sid::Maps low = sid::activate(ad::slice_channels(x, 0, 3), ad::slice_channels(x, 3, 1),
                                  ad::slice_channels(x, 4, 3));
    sid::Maps he = sid::activate(ad::slice_channels(x, 7, 3), ad::slice_channels(x, 10, 1),
                                 ad::slice_channels(x, 11, 3));
    return std::pair{low, he};
  };

  std::mt19937_64 rng(seed);
  const std::vector<double> x0 = uniform(rng, ad::numel(shape), -1.5, 1.5);
  sid::FrozenWeights frozen;
  {
    Tape tape;
    const auto [low, he] = split(tape.constant(shape, x0));
    frozen = sid::freeze_weights(low, he, cfg.alpha);
  }
  const ad::ScalarFn f = [&](Tape&, const Tensor& x) {
    const auto [low, he] = split(x);
    return sid::total_loss(low, he, low_t, he_t, frozen, cfg).total;
  };
  return ad::grad_check(f, shape, x0).max_rel_error;
}

std::vector<CheckRow> gradient_checks(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CheckRow> rows;
  const Shape shape{3, 4, 5};
  const std::size_t n = ad::numel(shape);
  auto add_row = [&](const std::string& name, double err, double tol = kOpTolerance) {
    rows.push_back(below("grad " + name, err, tol));
  };

  add_row("add", check_binary(rng, [](const Tensor& a, const Tensor& b) { return a + b; }));
  add_row("sub", check_binary(rng, [](const Tensor& a, const Tensor& b) { return a - b; }));
  add_row("mul", check_binary(rng, [](const Tensor& a, const Tensor& b) { return a * b; }));
  add_row("div", check_binary(rng, [](const Tensor& a, const Tensor& b) { return a / b; }));
  add_row("atan2", check_binary(rng, [](const Tensor& a, const Tensor& b) { return ad::atan2(a, b); }));

  const auto signed_x = away_from_zero(rng, n);
  const auto positive_x = uniform(rng, n, 0.1, 1.0);
  add_row("negate", check_unary(rng, shape, signed_x, [](const Tensor& a) { return -a; }));
  add_row("scale", check_unary(rng, shape, signed_x, [](const Tensor& a) { return a * 2.5 + 1.0; }));
  add_row("abs", check_unary(rng, shape, signed_x, [](const Tensor& a) { return ad::abs(a); }));
  add_row("exp", check_unary(rng, shape, signed_x, [](const Tensor& a) { return ad::exp(a); }));
  add_row("pow", check_unary(rng, shape, positive_x, [](const Tensor& a) { return ad::pow(a, 1.0 / 2.2); }));
  add_row("sigmoid", check_unary(rng, shape, signed_x, [](const Tensor& a) { return ad::sigmoid(a); }));
  add_row("tanh", check_unary(rng, shape, signed_x, [](const Tensor& a) { return ad::tanh(a); }));
  add_row("relu", check_unary(rng, shape, signed_x, [](const Tensor& a) { return ad::relu(a); }));
  add_row("clamp", check_unary(rng, shape, signed_x, [](const Tensor& a) { return ad::clamp(a, -0.5, 0.5); }));
  add_row("wrap_angle", check_unary(rng, shape, uniform(rng, n, -6.0, 6.0),
                                    [](const Tensor& a) { return ad::wrap_angle(a); }));
  add_row("spatial_diff h", check_unary(rng, shape, signed_x, [](const Tensor& a) {
            return ad::spatial_diff(a, ad::Axis::horizontal);
          }));
  add_row("spatial_diff v", check_unary(rng, shape, signed_x, [](const Tensor& a) {
            return ad::spatial_diff(a, ad::Axis::vertical);
          }));
  add_row("channel", check_unary(rng, shape, signed_x, [](const Tensor& a) { return ad::channel(a, 1); }));
  add_row("channel_mean", check_unary(rng, shape, signed_x, [](const Tensor& a) { return ad::channel_mean(a); }));

  add_row("sum", check_reduce(shape, signed_x, [](const Tensor& a) { return ad::sum(a); }));
  add_row("mean", check_reduce(shape, signed_x, [](const Tensor& a) { return ad::mean(a); }));
  add_row("l1", check_reduce(shape, signed_x, [](const Tensor& a) { return ad::l1(a); }));
  add_row("fro", check_reduce(shape, signed_x, [](const Tensor& a) { return ad::fro(a); }));
  add_row("fro_sq", check_reduce(shape, signed_x, [](const Tensor& a) { return ad::fro_sq(a); }));

  {
    // conv2d with respect to input, kernel and bias in turn.
    const Shape in_shape{2, 5, 6};
    const Shape k_shape{3, 2, 3, 3};
    const Shape b_shape{3};
    const auto input = uniform(rng, ad::numel(in_shape), -1.0, 1.0);
    const auto kernel = uniform(rng, ad::numel(k_shape), -1.0, 1.0);
    const auto bias = uniform(rng, ad::numel(b_shape), -1.0, 1.0);
    double err = check_unary(rng, in_shape, input, [&](const Tensor& x) {
      Tape& t = x.tape();
      return ad::conv2d(x, t.constant(k_shape, kernel), t.constant(b_shape, bias));
    });
    err = std::max(err, check_unary(rng, k_shape, kernel, [&](const Tensor& k) {
      Tape& t = k.tape();
      return ad::conv2d(t.constant(in_shape, input), k, t.constant(b_shape, bias));
    }));
    err = std::max(err, check_unary(rng, b_shape, bias, [&](const Tensor& b) {
      Tape& t = b.tape();
      return ad::conv2d(t.constant(in_shape, input), t.constant(k_shape, kernel), b);
    }));
    add_row("conv2d", err);
  }

  {
    // Full loss, direct parameterization, 8x8 image, no gradient suppression.
    std::mt19937_64 img_rng(seed + 1);
    Image source(8, 8, 3, uniform(img_rng, 8 * 8 * 3, 0.02, 0.6));
    sid::SidConfig cfg;
    cfg.epsilon = 0.0;
    add_row("total_loss (direct, 8x8)", total_loss_grad_error(source, cfg, seed + 2), kLossTolerance);
  }
  return rows;
}

std::vector<CheckRow> curve_checks(std::uint64_t seed) {
  std::vector<CheckRow> rows;
  const double g02 = nism::apply_gamma(0.2, 2.2);
  const double g08 = nism::apply_gamma(0.8, 2.2);
  rows.push_back({"gamma(0.2, 2.2) in [0.47, 0.49]", g02, 0.49, g02 >= 0.47 && g02 <= 0.49});
  rows.push_back({"gamma(0.8, 2.2) in [0.89, 0.92]", g08, 0.92, g08 >= 0.89 && g08 <= 0.92});

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> t_dist(0.21, 0.99);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double t = t_dist(rng);
    const nism::NismParams p = nism::eta_from_threshold(t);
    if (!p.clamped) worst = std::max(worst, std::abs(nism::apply_nism(t, p.eta) - nism::kBrightTarget));
  }
  rows.push_back(below("nism(T, eta(T)) == 0.8", worst, 1e-9));

  double sym = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double a = static_cast<double>(i) / 999.0;
    sym = std::max(sym, std::abs(nism::apply_nism(1.0 - nism::apply_gamma(a, 2.2), 2.2) - (1.0 - a)));
  }
  rows.push_back(below("nism/gamma reflection about x+y=1", sym, 1e-12));

  // Dark pixels are lifted less than by gamma, bright pixels more.
  const double dark_gap = nism::apply_gamma(0.1, 2.2) - nism::apply_nism(0.1, 2.2);
  const double bright_gap = nism::apply_nism(0.9, 2.2) - nism::apply_gamma(0.9, 2.2);
  rows.push_back({"nism(0.1) < gamma(0.1)", dark_gap, 0.0, dark_gap > 0.0});
  rows.push_back({"nism(0.9) > gamma(0.9)", bright_gap, 0.0, bright_gap > 0.0});

  auto slope = [](auto fn, double x) {
    const double h = 1e-7;
    return (fn(x + h) - fn(x - h)) / (2.0 * h);
  };
  auto nism_fn = [](double x) { return nism::apply_nism(x, 2.2); };
  auto gamma_fn = [](double x) { return nism::apply_gamma(x, 2.2); };
  const double near_black_gap = slope(gamma_fn, 0.02) - slope(nism_fn, 0.02);
  rows.push_back({"slope nism < gamma at 0.02", near_black_gap, 0.0, near_black_gap > 0.0});
  return rows;
}

std::vector<CheckRow> metric_checks(std::uint64_t seed) {
  std::vector<CheckRow> rows;
  std::mt19937_64 rng(seed);
  Image noise(32, 32, 3, uniform(rng, 32 * 32 * 3, 0.0, 1.0));
  rows.push_back(below("ssim(x, x) == 1", std::abs(metrics::ssim(noise, noise) - 1.0), 1e-12));

  Image shifted = noise;
  Image base = noise;
  for (double& v : base.data()) v = std::clamp(v, 0.0, 0.9);
  shifted = base;
  for (double& v : shifted.data()) v += 0.1;
  rows.push_back(below("psnr(offset 0.1) == 20 dB", std::abs(metrics::psnr(shifted, base) - 20.0), 1e-9));

  Image constant(16, 16, 3, 0.4);
  rows.push_back(below("gray_entropy(constant) == 0", std::abs(metrics::gray_entropy(constant)), 1e-12));

  Image ramp(16, 16, 1);
  for (std::size_t i = 0; i < 256; ++i) ramp.data()[i] = static_cast<double>(i) / 255.0;
  rows.push_back(below("gray_entropy(uniform) == 8", std::abs(metrics::gray_entropy(ramp) - 8.0), 1e-9));

  Image gray_rgb(16, 16, 3);
  for (std::size_t i = 0; i < 256; ++i) {
    for (std::size_t c = 0; c < 3; ++c) gray_rgb.data()[3 * i + c] = noise.data()[3 * i];
  }
  const double ce_gap = std::abs(metrics::color_entropy(gray_rgb) - 3.0 * metrics::gray_entropy(gray_rgb));
  rows.push_back(below("color_entropy == 3 gray_entropy (gray)", ce_gap, 1e-9));
  return rows;
}

bool run_selftest(std::ostream& out) {
  bool ok = true;
  auto print = [&](const std::string& suite, const std::vector<CheckRow>& rows) {
    out << "== " << suite << '\n';
    for (const CheckRow& r : rows) {
      out << fmt::format("{:<4} {:<44} value={:<12.4e} tol={:.1e}\n", r.passed ? "PASS" : "FAIL", r.name,
                         r.value, r.tolerance);
      ok = ok && r.passed;
    }
  };
  print("gradient checks (max relative error)", gradient_checks());
  print("illumination curves", curve_checks());
  print("metrics", metric_checks());
  out << (ok ? "self-test passed\n" : "self-test FAILED\n");
  return ok;
}

}  // namespace sidnism::selftest
