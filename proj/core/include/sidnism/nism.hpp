#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sidnism/image.hpp"

namespace sidnism::nism {

/// Illumination level that the dimmest bright-cluster pixel is mapped to.
inline constexpr double kBrightTarget = 0.8;
inline constexpr double kEtaMin = 1.0;
inline constexpr double kEtaMax = 20.0;

struct NismParams {
  double threshold = 0.0;  ///< T: minimum illumination of the bright cluster
  double eta = 1.0;        ///< curve exponent, within [kEtaMin, kEtaMax]
  bool clamped = false;    ///< eta hit a clamp bound
  bool degenerate = false; ///< near-constant map or T at 1; eta forced to 1
};

struct Clustering {
  double dark_centroid = 0.0;
  double bright_centroid = 0.0;
  std::vector<int> labels;  ///< 0 = dark, 1 = bright, in input order
};

/// Two-cluster Lloyd iteration initialized at the 25th/75th percentiles.
/// Stops after 100 rounds or when no centroid moves by 1e-6. Throws
/// std::invalid_argument with fewer than two distinct values.
Clustering kmeans_1d(std::span<const double> values);

/// ln(0.2) / ln(1 - T), clamped to [kEtaMin, kEtaMax].
NismParams eta_from_threshold(double threshold);

/// Clusters a 1-channel illumination map and derives T and eta.
NismParams estimate_eta(const Image& illumination);

/// 1 - (1 - L)^eta
double apply_nism(double illumination, double eta);
Image apply_nism(const Image& illumination, double eta);

/// L^(1/gamma)
double apply_gamma(double illumination, double gamma);
Image apply_gamma(const Image& illumination, double gamma);

/// Per-channel R * L_hat, clamped to [0,1].
Image recompose(const Image& reflectance, const Image& illumination);

}  // namespace sidnism::nism
