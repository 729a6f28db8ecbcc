#include "sidnism/nism.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sidnism::nism {

namespace {

constexpr std::size_t kMaxSamples = 65536;
constexpr int kMaxRounds = 100;
constexpr double kTolerance = 1e-6;

// Linear-interpolated quantile of sorted data.
double quantile(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

bool nearer_bright(double v, double dark, double bright) {
  return std::abs(v - bright) < std::abs(v - dark);
}

}  // namespace

Clustering kmeans_1d(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() < 2 || sorted.front() == sorted.back()) {
    throw std::invalid_argument("kmeans_1d needs at least two distinct values");
  }

  double dark = quantile(sorted, 0.25);
  double bright = quantile(sorted, 0.75);
  if (dark == bright) {
    dark = sorted.front();
    bright = sorted.back();
  }

  // Clusters are contiguous in sorted order; `split` is the first bright index.
  // Working on sorted data makes the result independent of input order.
  std::size_t split = 0;
  for (int round = 0; round < kMaxRounds; ++round) {
    split = static_cast<std::size_t>(
        std::partition_point(sorted.begin(), sorted.end(),
                             [&](double v) { return !nearer_bright(v, dark, bright); }) -
        sorted.begin());
    double next_dark = dark;
    double next_bright = bright;
    if (split > 0) {
      next_dark = std::accumulate(sorted.begin(), sorted.begin() + split, 0.0) / static_cast<double>(split);
    }
    if (split < sorted.size()) {
      next_bright = std::accumulate(sorted.begin() + split, sorted.end(), 0.0) /
                    static_cast<double>(sorted.size() - split);
    }
    const double moved = std::max(std::abs(next_dark - dark), std::abs(next_bright - bright));
    dark = next_dark;
    bright = next_bright;
    if (moved < kTolerance) break;
  }

  Clustering out;
  out.dark_centroid = dark;
  out.bright_centroid = bright;
  out.labels.reserve(values.size());
  for (double v : values) out.labels.push_back(nearer_bright(v, dark, bright) ? 1 : 0);
  return out;
}

NismParams eta_from_threshold(double threshold) {
  NismParams p;
  p.threshold = threshold;
  if (!(threshold < 1.0 - 1e-6)) {
    p.degenerate = true;
    p.eta = 1.0;
    return p;
  }
  const double eta = std::log(1.0 - kBrightTarget) / std::log(1.0 - threshold);
  p.eta = std::clamp(eta, kEtaMin, kEtaMax);
  p.clamped = p.eta != eta;
  return p;
}

NismParams estimate_eta(const Image& illumination) {
  if (illumination.channels() != 1) throw std::invalid_argument("estimate_eta expects a 1-channel map");
  const auto data = illumination.data();
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  if (data.empty() || *hi - *lo < 1e-3) {
    NismParams p;
    p.threshold = data.empty() ? 0.0 : *hi;
    p.degenerate = true;
    return p;
  }

  std::vector<double> samples;
  const std::size_t stride = (data.size() + kMaxSamples - 1) / kMaxSamples;
  for (std::size_t i = 0; i < data.size(); i += stride) samples.push_back(data[i]);
  if (std::all_of(samples.begin(), samples.end(), [&](double v) { return v == samples.front(); })) {
    samples.assign(data.begin(), data.end());
  }
  const Clustering c = kmeans_1d(samples);

  double threshold = 1.0;
  for (double v : data) {
    if (nearer_bright(v, c.dark_centroid, c.bright_centroid)) threshold = std::min(threshold, v);
  }
  return eta_from_threshold(threshold);
}

double apply_nism(double illumination, double eta) { return 1.0 - std::pow(1.0 - illumination, eta); }

Image apply_nism(const Image& illumination, double eta) {
  Image out = illumination;
  for (double& v : out.data()) v = apply_nism(v, eta);
  return out;
}

double apply_gamma(double illumination, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  return std::pow(illumination, 1.0 / gamma);
}

Image apply_gamma(const Image& illumination, double gamma) {
  Image out = illumination;
  for (double& v : out.data()) v = apply_gamma(v, gamma);
  return out;
}

Image recompose(const Image& reflectance, const Image& illumination) {
  if (illumination.channels() != 1 || reflectance.height() != illumination.height() ||
      reflectance.width() != illumination.width()) {
    throw std::invalid_argument("recompose: reflectance and 1-channel illumination must share a size");
  }
  Image out = reflectance;
  const std::size_t ch = reflectance.channels();
  const auto l = illumination.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < l.size(); ++i) {
    for (std::size_t c = 0; c < ch; ++c) dst[i * ch + c] = std::clamp(dst[i * ch + c] * l[i], 0.0, 1.0);
  }
  return out;
}

}  // namespace sidnism::nism
