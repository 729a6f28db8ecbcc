#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sidnism/decompose.hpp"
#include "synthetic.hpp"

namespace sidnism::sid {
namespace {

double reconstruction_error(const DecompositionResult& d, const Image& s) {
  double acc = 0.0;
  for (std::size_t y = 0; y < s.height(); ++y) {
    for (std::size_t x = 0; x < s.width(); ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        acc += std::abs(d.reflectance_low.at(y, x, c) * d.illumination_low.at(y, x) + d.noise_low.at(y, x, c) -
                        s.at(y, x, c));
      }
    }
  }
  return acc / static_cast<double>(s.size());
}

SidConfig short_config(int iterations) {
  SidConfig cfg;
  cfg.iterations = iterations;
  return cfg;
}

TEST(DecomposeTest, OutputShapesAndRanges) {
  const Image s = testing::make_low_light_scene(1, 16).source;
  const DecompositionResult d = decompose(s, short_config(20));
  EXPECT_EQ(d.loss_history.size(), 20u);
  EXPECT_FALSE(d.aborted);
  EXPECT_EQ(d.illumination_low.channels(), 1u);
  EXPECT_EQ(d.reflectance_he.channels(), 3u);
  EXPECT_TRUE(d.reflectance_low.in_unit_range());
  EXPECT_TRUE(d.illumination_he.in_unit_range());
  for (double v : d.noise_low.data()) EXPECT_TRUE(v >= -1.0 && v <= 1.0);
}

TEST(DecomposeTest, SameSeedIsBitwiseIdentical) {
  const Image s = testing::make_low_light_scene(2, 12).source;
  for (Mode mode : {Mode::direct, Mode::cnn}) {
    SidConfig cfg = short_config(8);
    cfg.mode = mode;
    cfg.channels = 6;
    cfg.depth = 2;
    cfg.seed = 42;
    const auto a = decompose(s, cfg);
    const auto b = decompose(s, cfg);
    std::ostringstream ca, cb;
    write_loss_csv(a.loss_history, ca);
    write_loss_csv(b.loss_history, cb);
    EXPECT_EQ(ca.str(), cb.str());
    EXPECT_TRUE(std::equal(a.reflectance_low.data().begin(), a.reflectance_low.data().end(),
                           b.reflectance_low.data().begin()));
  }
}

TEST(DecomposeTest, TrailingWindowAveragesDoNotIncrease) {
  const Image s = testing::make_low_light_scene(3, 16).source;
  const DecompositionResult d = decompose(s, short_config(500));
  const auto& h = d.loss_history;
  ASSERT_EQ(h.size(), 500u);
  double previous = INFINITY;
  for (std::size_t start = 0; start + 100 <= h.size(); start += 100) {
    double avg = 0.0;
    for (std::size_t i = start; i < start + 100; ++i) avg += h[i].total;
    avg /= 100.0;
    EXPECT_LE(avg, previous) << "window starting at " << start;
    previous = avg;
  }
}

TEST(DecomposeTest, PureReconstructionFitsClosely) {
  SidConfig cfg = short_config(500);
  cfg.lambda_rc = cfg.lambda_illum = cfg.lambda_reflect = cfg.lambda_noise = 0.0;
  for (std::uint64_t seed : {4u, 5u}) {
    const Image s = testing::make_low_light_scene(seed, 16).source;
    EXPECT_LT(reconstruction_error(decompose(s, cfg), s), 0.01);
  }
}

TEST(DecomposeTest, ConsistencyImprovesOverInitialization) {
  // Zero-initialized direct maps start with identical reflectances, so only
  // the shared network has a nonzero starting consistency loss.
  const Image s = testing::make_low_light_scene(6, 16).source;
  SidConfig cfg = short_config(200);
  cfg.mode = Mode::cnn;
  cfg.channels = 8;
  cfg.depth = 2;
  const DecompositionResult d = decompose(s, cfg);
  EXPECT_GT(d.loss_history.front().rc, 0.0);
  EXPECT_LT(d.loss_history.back().rc, d.loss_history.front().rc);
}

TEST(DecomposeTest, NetworkModeRuns) {
  SidConfig cfg = short_config(5);
  cfg.mode = Mode::cnn;
  cfg.channels = 4;
  cfg.depth = 1;
  const Image s = testing::make_low_light_scene(7, 10).source;
  const DecompositionResult d = decompose(s, cfg);
  EXPECT_EQ(d.loss_history.size(), 5u);
  EXPECT_EQ(d.noise_he.height(), 10u);
}

TEST(DecomposeTest, InputValidation) {
  EXPECT_THROW(decompose(Image(7, 20, 3, 0.2), short_config(1)), std::invalid_argument);
  EXPECT_THROW(decompose(Image(10, 10, 1, 0.2), short_config(1)), std::invalid_argument);
  SidConfig bad = short_config(0);
  EXPECT_THROW(decompose(Image(10, 10, 3, 0.2), bad), std::invalid_argument);
}

TEST(DecomposeTest, BlackInputWarnsButRuns) {
  const DecompositionResult d = decompose(Image(8, 8, 3, 0.0), short_config(3));
  EXPECT_FALSE(d.warnings.empty());
  EXPECT_EQ(d.loss_history.size(), 3u);
}

TEST(LossCsvTest, HeaderAndRows) {
  std::vector<LossRecord> h(2);
  h[1].total = 0.5;
  std::ostringstream out;
  write_loss_csv(h, out);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "iteration,total,rec_low,rec_he,rc,illum_low,illum_he,reflect_low,reflect_he,noise_low,noise_he");
  EXPECT_NE(text.find("\n1,0.5,"), std::string::npos);
}

}  // namespace
}  // namespace sidnism::sid
