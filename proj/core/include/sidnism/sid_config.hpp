#pragma once

#include <cstdint>
#include <string>

namespace sidnism::sid {

enum class Mode {
  direct,  ///< independent per-pixel logit maps for each input
  cnn,     ///< one convolutional network shared by both inputs
};

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

/// Loss weights and optimizer settings for one decomposition.
struct SidConfig {
  double lambda_rc = 0.01;
  double lambda_illum = 0.1;
  double lambda_reflect = 0.001;
  double lambda_noise = 0.01;
  double alpha = 10.0;     ///< edge-awareness of the illumination smoothness weights
  double beta = 10.0;      ///< reflectance gradient amplification
  double epsilon = 0.01;   ///< source gradients below this are treated as noise
  int iterations = 500;
  double lr = 1e-3;
  Mode mode = Mode::direct;
  std::uint64_t seed = 0;
  int channels = 32;       ///< cnn hidden width
  int depth = 5;           ///< cnn hidden conv layers

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

}  // namespace sidnism::sid
