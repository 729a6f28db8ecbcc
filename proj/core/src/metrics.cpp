#include "sidnism/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sidnism/image_ops.hpp"
#include "sidnism/png_io.hpp"

namespace sidnism::metrics {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

double entropy_of_channel(const Image& img, std::size_t c) {
  std::array<std::size_t, 256> hist{};
  const std::size_t ch = img.channels();
  const auto d = img.data();
  for (std::size_t i = 0; i < img.pixel_count(); ++i) ++hist[quantize_u8(d[i * ch + c])];
  const double n = static_cast<double>(img.pixel_count());
  double h = 0.0;
  for (std::size_t count : hist) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
  }
  return h;
}

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double total = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    taps[i] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
    total += taps[i];
  }
  for (double& t : taps) t /= total;
  return taps;
}

// Separable Gaussian filter over valid positions only: output is
// (H-10) x (W-10).
std::vector<double> filter_valid(const std::vector<double>& src, std::size_t h, std::size_t w,
                                 const std::array<double, kWindow>& taps) {
  const std::size_t oh = h - kWindow + 1;
  const std::size_t ow = w - kWindow + 1;
  std::vector<double> rows(h * ow, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += taps[k] * src[y * w + x + k];
      rows[y * ow + x] = acc;
    }
  }
  std::vector<double> out(oh * ow, 0.0);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += taps[k] * rows[(y + k) * ow + x];
      out[y * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

double gray_entropy(const Image& img) { return entropy_of_channel(gray_of(img), 0); }

double color_entropy(const Image& img) {
  if (img.channels() != 3) throw std::invalid_argument("color_entropy expects a 3-channel image");
  return entropy_of_channel(img, 0) + entropy_of_channel(img, 1) + entropy_of_channel(img, 2);
}

double gray_mean_illumination(const Image& img) {
  const Image gray = gray_of(img);
  double acc = 0.0;
  for (double v : gray.data()) acc += v * 255.0;
  return acc / static_cast<double>(gray.size());
}

double gray_mean_gradient(const Image& img) {
  const Image gray = gray_of(img);
  const Gradients g = spatial_gradients(gray);
  const auto gh = g.horizontal.data();
  const auto gv = g.vertical.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < gh.size(); ++i) acc += std::sqrt(gh[i] * gh[i] + gv[i] * gv[i]) * 255.0;
  return acc / static_cast<double>(gh.size());
}

double psnr(const Image& img, const Image& ref) {
  if (!img.same_shape(ref)) throw std::invalid_argument("psnr: image shapes differ");
  const auto a = img.data();
  const auto b = ref.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  const double mse = acc / static_cast<double>(a.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Image& img, const Image& ref) {
  if (img.height() != ref.height() || img.width() != ref.width()) {
    throw std::invalid_argument("ssim: image sizes differ");
  }
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  if (h < kWindow || w < kWindow) throw std::invalid_argument("ssim: image smaller than the 11x11 window");

  const Image ga = gray_of(img);
  const Image gb = gray_of(ref);
  const std::vector<double> a(ga.data().begin(), ga.data().end());
  const std::vector<double> b(gb.data().begin(), gb.data().end());
  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto taps = gaussian_taps();
  const auto mu_a = filter_valid(a, h, w, taps);
  const auto mu_b = filter_valid(b, h, w, taps);
  const auto e_aa = filter_valid(aa, h, w, taps);
  const auto e_bb = filter_valid(bb, h, w, taps);
  const auto e_ab = filter_valid(ab, h, w, taps);

  double acc = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double var_a = e_aa[i] - ma * ma;
    const double var_b = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    acc += ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) /
           ((ma * ma + mb * mb + kC1) * (var_a + var_b + kC2));
  }
  return std::clamp(acc / static_cast<double>(mu_a.size()), 0.0, 1.0);
}

MetricsReport build_report(const Image& img, const Image* ref) {
  MetricsReport r;
  r.ge = gray_entropy(img);
  if (img.channels() == 3) r.ce = color_entropy(img);
  r.gmi = gray_mean_illumination(img);
  r.gmg = gray_mean_gradient(img);
  if (ref != nullptr) {
    r.psnr = psnr(img, *ref);
    r.ssim = ssim(img, *ref);
  }
  return r;
}

}  // namespace sidnism::metrics
