#include "sidnism/image_ops.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sidnism/png_io.hpp"

namespace sidnism {

Image to_grayscale(const Image& rgb) {
  if (rgb.channels() != 3) throw std::invalid_argument("to_grayscale expects a 3-channel image");
  Image out(rgb.height(), rgb.width(), 1);
  const auto src = rgb.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    dst[i] = kLumaR * src[3 * i] + kLumaG * src[3 * i + 1] + kLumaB * src[3 * i + 2];
  }
  return out;
}

Image gray_of(const Image& img) { return img.channels() == 1 ? img : to_grayscale(img); }

Image hist_equalize(const Image& img) {
  Image out = img;
  const std::size_t n = img.pixel_count();
  const std::size_t channels = img.channels();
  const auto src = img.data();
  auto dst = out.data();

  for (std::size_t c = 0; c < channels; ++c) {
    std::array<std::size_t, 256> hist{};
    for (std::size_t i = 0; i < n; ++i) ++hist[quantize_u8(src[i * channels + c])];

    std::size_t occupied = 0;
    for (std::size_t count : hist) occupied += count > 0 ? 1 : 0;
    if (occupied <= 1) continue;

    std::array<std::size_t, 256> cdf{};
    std::size_t running = 0;
    std::size_t cdf_min = 0;
    for (std::size_t level = 0; level < 256; ++level) {
      running += hist[level];
      cdf[level] = running;
      if (cdf_min == 0 && hist[level] > 0) cdf_min = running;
    }
    const double denom = static_cast<double>(n - cdf_min);
    std::array<double, 256> lut{};
    for (std::size_t level = 0; level < 256; ++level) {
      lut[level] = cdf[level] < cdf_min ? 0.0 : static_cast<double>(cdf[level] - cdf_min) / denom;
    }
    for (std::size_t i = 0; i < n; ++i) {
      dst[i * channels + c] = lut[quantize_u8(src[i * channels + c])];
    }
  }
  return out;
}

double hue_angle(double r, double g, double b) noexcept {
  const double y = std::numbers::sqrt3 * (g - b);
  const double x = 2.0 * r - g - b;
  if (y == 0.0 && x == 0.0) return 0.0;
  const double h = std::atan2(y, x);
  return h == -std::numbers::pi ? std::numbers::pi : h;
}

Image rgb_to_hue(const Image& rgb) {
  if (rgb.channels() != 3) throw std::invalid_argument("rgb_to_hue expects a 3-channel image");
  Image out(rgb.height(), rgb.width(), 1);
  const auto src = rgb.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    dst[i] = hue_angle(src[3 * i], src[3 * i + 1], src[3 * i + 2]);
  }
  return out;
}

Gradients spatial_gradients(const Image& img) {
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  const std::size_t ch = img.channels();
  Gradients g{Image(h, w, ch), Image(h, w, ch)};
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < ch; ++c) {
        if (x + 1 < w) g.horizontal.at(y, x, c) = img.at(y, x + 1, c) - img.at(y, x, c);
        if (y + 1 < h) g.vertical.at(y, x, c) = img.at(y + 1, x, c) - img.at(y, x, c);
      }
    }
  }
  return g;
}

}  // namespace sidnism
