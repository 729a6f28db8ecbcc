#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sidnism/grad_check.hpp"
#include "sidnism/image_ops.hpp"
#include "sidnism/ops.hpp"
#include "sidnism/tape.hpp"
#include "synthetic.hpp"

namespace sidnism::ad {
namespace {

std::vector<double> random_values(std::uint64_t seed, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

std::vector<double> as_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

TEST(TapeTest, SumGradientIsOnes) {
  Tape tape;
  const Tensor x = tape.variable({4}, {1, -2, 3, 0.5});
  tape.backward(sum(x));
  EXPECT_EQ(as_vector(x.grad()), (std::vector<double>{1, 1, 1, 1}));
}

TEST(TapeTest, SquareGradient) {
  Tape tape;
  const Tensor x = tape.variable({3}, {1, 2, 3});
  tape.backward(sum(x * x));
  EXPECT_EQ(as_vector(x.grad()), (std::vector<double>{2, 4, 6}));
}

TEST(TapeTest, SigmoidAtZero) {
  Tape tape;
  const Tensor x = tape.variable({3}, {0, 0, 0});
  const Tensor y = sigmoid(x);
  EXPECT_EQ(y.values()[0], 0.5);
  tape.backward(sum(y));
  for (double g : x.grad()) EXPECT_DOUBLE_EQ(g, 0.25);
}

TEST(TapeTest, TanhAtZero) {
  Tape tape;
  const Tensor x = tape.variable({1}, {0});
  const Tensor y = tanh(x);
  EXPECT_EQ(y.values()[0], 0.0);
  tape.backward(sum(y));
  EXPECT_DOUBLE_EQ(x.grad()[0], 1.0);
}

TEST(TapeTest, PowValue) {
  Tape tape;
  const Tensor y = pow(tape.constant({1}, {0.2}), 1.0 / 2.2);
  EXPECT_DOUBLE_EQ(y.values()[0], std::pow(0.2, 1.0 / 2.2));
  EXPECT_NEAR(y.values()[0], 0.4809, 5e-4);
}

TEST(TapeTest, Reductions) {
  Tape tape;
  EXPECT_DOUBLE_EQ(l1(tape.constant({3}, {1, -2, 3})).item(), 6.0);
  EXPECT_DOUBLE_EQ(mean(tape.constant({5}, std::vector<double>(5, 0.0))).item(), 0.0);
  EXPECT_DOUBLE_EQ(fro(tape.constant({2}, {3, 4})).item(), 5.0);
  EXPECT_DOUBLE_EQ(fro_sq(tape.constant({2}, {3, 4})).item(), 25.0);
}

TEST(TapeTest, DetachBlocksGradient) {
  Tape tape;
  const Tensor x = tape.variable({1}, {2});
  const Tensor d = detach(x);
  EXPECT_EQ(d.values()[0], 2.0);
  EXPECT_FALSE(d.requires_grad());
  tape.backward(sum(x * d));
  EXPECT_DOUBLE_EQ(x.grad()[0], 2.0);
}

TEST(TapeTest, DetachedOnlyGraphLeavesZeroGradient) {
  Tape tape;
  const Tensor x = tape.variable({2}, {1, 2});
  tape.backward(sum(exp(detach(x))));
  for (double g : x.grad()) EXPECT_EQ(g, 0.0);
}

TEST(TapeTest, VisitsEachNodeOnce) {
  Tape tape;
  const Tensor x = tape.variable({2}, {1, 2});
  const Tensor a = x * x;
  const Tensor b = a + a;  // a is consumed twice
  const Tensor loss = sum(b * x);
  tape.backward(loss);
  // Every recorded op runs once; the single leaf has no rule.
  EXPECT_EQ(tape.last_backward_visits(), tape.size() - 1);
  // d/dx 2x^3 = 6x^2
  EXPECT_DOUBLE_EQ(x.grad()[0], 6.0);
  EXPECT_DOUBLE_EQ(x.grad()[1], 24.0);
}

TEST(TapeTest, ParameterGradientIsPerSweep) {
  Parameter p({2}, {1.0, 3.0});
  for (int round = 0; round < 2; ++round) {
    Tape tape;
    const Tensor x = tape.parameter(p);
    tape.backward(sum(x * x));
  }
  // Two sweeps accumulate into the parameter buffer until zero_grad.
  EXPECT_DOUBLE_EQ(p.grad[1], 12.0);
  p.zero_grad();
  EXPECT_EQ(p.grad[1], 0.0);
}

TEST(TapeTest, RejectsNonScalarLossAndBadShapes) {
  Tape tape;
  const Tensor x = tape.variable({2}, {1, 2});
  EXPECT_THROW(tape.backward(x), std::invalid_argument);
  EXPECT_THROW(tape.variable({2}, {1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(add(x, tape.constant({3}, {1, 2, 3})), std::invalid_argument);
}

TEST(ConvTest, DeltaKernelIsIdentity) {
  Tape tape;
  const auto in = random_values(1, 2 * 5 * 6);
  std::vector<double> k(2 * 2 * 9, 0.0);
  k[(0 * 2 + 0) * 9 + 4] = 1.0;
  k[(1 * 2 + 1) * 9 + 4] = 1.0;
  const Tensor y = conv2d(tape.constant({2, 5, 6}, in), tape.constant({2, 2, 3, 3}, k),
                          tape.constant({2}, {0, 0}));
  EXPECT_EQ(as_vector(y.values()), in);
}

TEST(ConvTest, OnesKernelCountsValidTaps) {
  Tape tape;
  const Tensor y = conv2d(tape.constant({1, 4, 5}, std::vector<double>(20, 1.0)),
                          tape.constant({1, 1, 3, 3}, std::vector<double>(9, 1.0)), tape.constant({1}, {0}));
  const auto v = y.values();
  EXPECT_EQ(v[0], 4.0);
  EXPECT_EQ(v[4], 4.0);
  EXPECT_EQ(v[15], 4.0);
  EXPECT_EQ(v[19], 4.0);
  EXPECT_EQ(v[1], 6.0);
  EXPECT_EQ(v[5 + 2], 9.0);
  EXPECT_EQ(v[10 + 3], 9.0);
}

TEST(ConvTest, GradientMatchesFiniteDifferences) {
  const Shape in_shape{2, 5, 4};
  const auto kernel = random_values(2, 3 * 2 * 9);
  const auto bias = random_values(3, 3);
  const auto x = random_values(4, numel(in_shape));
  const auto r = grad_check(
      [&](Tape& t, const Tensor& in) {
        const Tensor y = conv2d(in, t.constant({3, 2, 3, 3}, kernel), t.constant({3}, bias));
        return sum(y * y);
      },
      in_shape, x);
  EXPECT_LT(r.max_rel_error, 1e-4);
}

TEST(SpatialDiffTest, ConstantGivesZeros) {
  Tape tape;
  const Tensor y = spatial_diff(tape.constant({2, 3, 3}, std::vector<double>(18, 0.7)), Axis::vertical);
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(SpatialDiffTest, MatchesImageGradientsExactly) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t h = 3 + seed % 7, w = 4 + seed % 5, c = seed % 2 ? 3 : 1;
    const Image img = testing::random_image(seed, h, w, c);
    const Gradients g = spatial_gradients(img);
    Tape tape;
    const Tensor t = tape.constant({c, h, w}, img.to_planar());
    const auto dh = as_vector(spatial_diff(t, Axis::horizontal).values());
    const auto dv = as_vector(spatial_diff(t, Axis::vertical).values());
    const auto eh = g.horizontal.to_planar();
    const auto ev = g.vertical.to_planar();
    ASSERT_TRUE(std::equal(dh.begin(), dh.end(), eh.begin())) << "seed " << seed;
    ASSERT_TRUE(std::equal(dv.begin(), dv.end(), ev.begin())) << "seed " << seed;
  }
}

TEST(GradCheckTest, LinearIsExact) {
  const auto x = random_values(5, 12);
  EXPECT_LT(grad_check([](Tape&, const Tensor& t) { return sum(t); }, {3, 4}, x).max_rel_error, 1e-10);
}

TEST(GradCheckTest, QuadraticIsTight) {
  const auto x = random_values(6, 12);
  EXPECT_LT(grad_check([](Tape&, const Tensor& t) { return fro_sq(t); }, {12}, x).max_rel_error, 1e-6);
}

TEST(GradCheckTest, SmoothOpsPass) {
  const auto x = random_values(7, 2 * 3 * 4, 0.2, 0.9);
  const std::vector<ScalarFn> fns = {
      [](Tape&, const Tensor& t) { return sum(exp(t) * sigmoid(t)); },
      [](Tape&, const Tensor& t) { return mean(tanh(t) / (t + 1.0)); },
      [](Tape&, const Tensor& t) { return fro(pow(t, 1.7)); },
      [](Tape&, const Tensor& t) { return sum(spatial_diff(t, Axis::horizontal) * channel_mean(t)); },
      [](Tape&, const Tensor& t) { return sum(atan2(channel(t, 0), channel(t, 1) - 0.5)); },
  };
  for (const auto& f : fns) EXPECT_LT(grad_check(f, {2, 3, 4}, x).max_rel_error, 1e-4);
}

// A rule with its sign flipped must be caught by the checker.
Tensor broken_square(const Tensor& a) {
  Tape& tape = a.tape();
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v *= v;
  return tape.record(a.shape(), std::move(out), {a}, [](Tape& t, std::size_t self) {
    const std::size_t in = t.inputs_of(self)[0];
    auto gin = t.input_grad(in);
    const auto g = t.grad_of(self);
    const auto x = t.value_of(in);
    for (std::size_t i = 0; i < gin.size(); ++i) gin[i] += -2.0 * x[i] * g[i];
  });
}

TEST(GradCheckTest, DetectsSignFlip) {
  const auto x = random_values(8, 6, 0.5, 1.5);
  const auto r = grad_check([](Tape&, const Tensor& t) { return sum(broken_square(t)); }, {6}, x);
  EXPECT_GE(r.max_rel_error, 0.1);
}

}  // namespace
}  // namespace sidnism::ad
