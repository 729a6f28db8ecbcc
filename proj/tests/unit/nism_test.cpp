#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sidnism/nism.hpp"
#include "synthetic.hpp"

namespace sidnism::nism {
namespace {

TEST(KmeansTest, TwoPointMasses) {
  std::vector<double> v(100, 0.1);
  std::fill(v.begin() + 50, v.end(), 0.9);
  const Clustering c = kmeans_1d(v);
  EXPECT_NEAR(c.dark_centroid, 0.1, 1e-12);
  EXPECT_NEAR(c.bright_centroid, 0.9, 1e-12);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(c.labels[i], i >= 50 ? 1 : 0);
}

TEST(KmeansTest, OnePointPerCluster) {
  const std::vector<double> v{0.8, 0.2};
  const Clustering c = kmeans_1d(v);
  EXPECT_DOUBLE_EQ(c.dark_centroid, 0.2);
  EXPECT_DOUBLE_EQ(c.bright_centroid, 0.8);
  EXPECT_EQ(c.labels, (std::vector<int>{1, 0}));
}

TEST(KmeansTest, PermutationInvariantAndOrdered) {
  const Image img = testing::random_image(3, 20, 20, 1);
  std::vector<double> v(img.data().begin(), img.data().end());
  const Clustering a = kmeans_1d(v);
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), std::mt19937_64(4));
  std::vector<double> shuffled(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) shuffled[i] = v[order[i]];
  const Clustering b = kmeans_1d(shuffled);
  EXPECT_EQ(a.dark_centroid, b.dark_centroid);
  EXPECT_EQ(a.bright_centroid, b.bright_centroid);
  double max_dark = -1.0, min_bright = 2.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(b.labels[i], a.labels[order[i]]);
    (a.labels[i] ? min_bright : max_dark) = a.labels[i] ? std::min(min_bright, v[i]) : std::max(max_dark, v[i]);
  }
  EXPECT_LE(max_dark, min_bright);
}

TEST(KmeansTest, RejectsDegenerateInput) {
  EXPECT_THROW(kmeans_1d(std::vector<double>(5, 0.3)), std::invalid_argument);
}

TEST(EtaTest, Examples) {
  EXPECT_NEAR(eta_from_threshold(0.5).eta, std::log(0.2) / std::log(0.5), 1e-15);
  EXPECT_NEAR(eta_from_threshold(0.5).eta, 2.3219, 1e-4);
  EXPECT_DOUBLE_EQ(eta_from_threshold(0.8).eta, 1.0);
  // Dark thresholds need steep curves; bright ones would darken below eta 1.
  EXPECT_NEAR(eta_from_threshold(0.1).eta, std::log(0.2) / std::log(0.9), 1e-12);
  const NismParams dark = eta_from_threshold(0.05);
  EXPECT_EQ(dark.eta, kEtaMax);
  EXPECT_TRUE(dark.clamped);
  const NismParams bright = eta_from_threshold(0.9);
  EXPECT_EQ(bright.eta, kEtaMin);
  EXPECT_TRUE(bright.clamped);
  EXPECT_GE(apply_nism(0.9, bright.eta), kBrightTarget);
  EXPECT_TRUE(eta_from_threshold(1.0).degenerate);
}

TEST(EtaTest, ConstantMapIsDegenerate) {
  const NismParams p = estimate_eta(Image(10, 10, 1, 0.3));
  EXPECT_TRUE(p.degenerate);
  EXPECT_EQ(p.eta, 1.0);
}

TEST(EtaTest, ThresholdIsBrightClusterMinimum) {
  Image l(10, 10, 1, 0.1);
  for (std::size_t i = 50; i < 100; ++i) l.data()[i] = 0.5 + 0.004 * static_cast<double>(i - 50);
  const NismParams p = estimate_eta(l);
  EXPECT_DOUBLE_EQ(p.threshold, 0.5);
  EXPECT_NEAR(apply_nism(p.threshold, p.eta), kBrightTarget, 1e-9);
}

TEST(EtaTest, LargeMapsAreSubsampledButExact) {
  const Image l = testing::random_image(9, 300, 300, 1, 0.05, 0.6);
  const NismParams p = estimate_eta(l);
  EXPECT_FALSE(p.degenerate);
  // T must be one of the actual pixel values.
  EXPECT_NE(std::find(l.data().begin(), l.data().end(), p.threshold), l.data().end());
}

TEST(CurveTest, Endpoints) {
  for (double eta : {1.0, 2.2, 7.5, 20.0}) {
    EXPECT_EQ(apply_nism(0.0, eta), 0.0);
    EXPECT_EQ(apply_nism(1.0, eta), 1.0);
    EXPECT_EQ(apply_gamma(1.0, eta), 1.0);
  }
  for (double l : {0.0, 0.13, 0.5, 0.97}) {
    EXPECT_DOUBLE_EQ(apply_nism(l, 1.0), l);
    EXPECT_DOUBLE_EQ(apply_gamma(l, 1.0), l);
  }
  EXPECT_DOUBLE_EQ(apply_gamma(0.2, 2.2), std::pow(0.2, 1.0 / 2.2));
  EXPECT_NEAR(apply_gamma(0.2, 2.2), 0.4809, 5e-4);
  EXPECT_THROW(apply_gamma(0.5, 0.0), std::invalid_argument);
}

TEST(CurveTest, MonotoneAndBrightening) {
  for (double eta : {1.0, 1.5, 2.2, 5.0, 20.0}) {
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double l = i / 1000.0;
      const double v = apply_nism(l, eta);
      EXPECT_GE(v, l - 1e-15);
      if (i > 0 && eta < 20.0) EXPECT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(CurveTest, ReflectionOfGammaAcrossAntiDiagonal) {
  for (int i = 0; i <= 1000; ++i) {
    const double a = i / 1000.0;
    EXPECT_NEAR(apply_nism(1.0 - apply_gamma(a, 2.2), 2.2), 1.0 - a, 1e-12);
  }
}

TEST(CurveTest, DarkLiftedLessBrightSaturatedMore) {
  // Values: nism below gamma in the shadows and above it in the highlights.
  EXPECT_LT(apply_nism(0.1, 2.2), apply_gamma(0.1, 2.2));
  EXPECT_GT(apply_nism(0.9, 2.2), apply_gamma(0.9, 2.2));
  // Slope: gamma is steeper near black. At L = 0.1 itself nism is already
  // steeper (1.94 vs 1.60), and at 0.9 it is flatter (0.14 vs 0.48).
  const double h = 1e-6;
  auto slope = [h](auto f, double l) { return (f(l + h) - f(l - h)) / (2 * h); };
  auto nism = [](double l) { return apply_nism(l, 2.2); };
  auto gamma = [](double l) { return apply_gamma(l, 2.2); };
  EXPECT_LT(slope(nism, 0.02), slope(gamma, 0.02));
  EXPECT_GT(slope(nism, 0.1), slope(gamma, 0.1));
  EXPECT_LT(slope(nism, 0.9), slope(gamma, 0.9));
}

TEST(RecomposeTest, Examples) {
  const Image r = testing::random_image(2, 5, 6, 3);
  const Image ones = recompose(r, Image(5, 6, 1, 1.0));
  EXPECT_TRUE(std::equal(ones.data().begin(), ones.data().end(), r.data().begin()));
  const Image black = recompose(r, Image(5, 6, 1, 0.0));
  for (double v : black.data()) EXPECT_EQ(v, 0.0);
  const Image quarter = recompose(Image(5, 6, 3, 0.5), Image(5, 6, 1, 0.5));
  for (double v : quarter.data()) EXPECT_EQ(v, 0.25);
  const Image clipped = recompose(Image(5, 6, 3, 0.9), Image(5, 6, 1, 1.5));
  for (double v : clipped.data()) EXPECT_EQ(v, 1.0);
  EXPECT_THROW(recompose(r, Image(5, 7, 1, 1.0)), std::invalid_argument);
}

}  // namespace
}  // namespace sidnism::nism
