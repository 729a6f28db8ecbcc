#pragma once

#include <optional>

#include "sidnism/image.hpp"

namespace sidnism::metrics {

inline constexpr double kPsnrCap = 100.0;

/// Shannon entropy (bits) of the 256-bin histogram of the gray image.
double gray_entropy(const Image& img);
/// Sum of the per-channel 256-bin entropies. RGB only.
double color_entropy(const Image& img);
/// Mean gray level on the 0-255 scale.
double gray_mean_illumination(const Image& img);
/// Mean forward-difference gradient magnitude of the gray image, 0-255 scale.
double gray_mean_gradient(const Image& img);
/// 10 log10(1 / MSE) over all samples; identical images give kPsnrCap.
double psnr(const Image& img, const Image& ref);
/// Single-scale gray SSIM: 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, dynamic range 1, averaged over valid window positions and
/// clamped to [0,1].
double ssim(const Image& img, const Image& ref);

struct MetricsReport {
  double ge = 0.0;
  std::optional<double> ce;  ///< RGB images only
  double gmi = 0.0;
  double gmg = 0.0;
  std::optional<double> psnr;
  std::optional<double> ssim;
};

MetricsReport build_report(const Image& img, const Image* ref = nullptr);

}  // namespace sidnism::metrics
