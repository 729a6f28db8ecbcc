#pragma once

#include <cstdint>
#include <vector>

#include "sidnism/losses.hpp"

namespace sidnism::sid {

/// sigmoid / sigmoid / tanh heads: R, L in [0,1], N in [-1,1].
Maps activate(const ad::Tensor& r_logits, const ad::Tensor& l_logits, const ad::Tensor& n_logits);

/// Per-pixel logits optimized directly, one set per input image.
class LogitMaps {
 public:
  /// Zero logits: R = L = 0.5, N = 0.
  LogitMaps(std::size_t height, std::size_t width);

  Maps forward(ad::Tape& tape);
  std::vector<ad::Parameter*> parameters();

  ad::Parameter reflectance;   // [3,H,W]
  ad::Parameter illumination;  // [1,H,W]
  ad::Parameter noise;         // [3,H,W]
};

/// Plain conv/relu feature stack followed by three 3x3 heads.
class SidNetwork {
 public:
  SidNetwork() = default;
  /// He-uniform kernels, zero biases, drawn from `seed`.
  SidNetwork(int width, int depth, std::uint64_t seed);

  bool initialized() const noexcept { return !layers_.empty(); }
  /// Throws std::logic_error when default-constructed.
  Maps forward(ad::Tape& tape, const ad::Tensor& source);
  std::vector<ad::Parameter*> parameters();

 private:
  struct Conv {
    ad::Parameter kernel;
    ad::Parameter bias;
  };

  std::vector<Conv> layers_;
  Conv head_r_;
  Conv head_l_;
  Conv head_n_;
};

}  // namespace sidnism::sid
