#pragma once

#include "sidnism/image.hpp"

namespace sidnism {

inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

/// Luma 0.299 R + 0.587 G + 0.114 B. Throws for single-channel input.
Image to_grayscale(const Image& rgb);

/// Single-channel view of any image: luma for RGB, a copy for gray.
Image gray_of(const Image& img);

/// Per-channel histogram equalization over 256 quantized levels.
///
/// Each level v maps to (cdf(v) - cdf_min) / (n - cdf_min). Channels with at
/// most one occupied level are returned unchanged.
Image hist_equalize(const Image& img);

/// Hue angle in (-pi, pi] from the chroma form atan2(sqrt(3)(G-B), 2R-G-B).
/// Achromatic pixels map to 0.
double hue_angle(double r, double g, double b) noexcept;
Image rgb_to_hue(const Image& rgb);

struct Gradients {
  Image horizontal;
  Image vertical;
};

/// Forward differences; the last column (horizontal) and last row (vertical)
/// are zero.
Gradients spatial_gradients(const Image& img);

}  // namespace sidnism
