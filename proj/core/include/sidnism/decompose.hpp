#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sidnism/image.hpp"
#include "sidnism/sid_config.hpp"

namespace sidnism::sid {

/// Unweighted loss terms of one iteration plus the weighted total.
struct LossRecord {
  double total = 0.0;
  double rec_low = 0.0, rec_he = 0.0;
  double rc = 0.0;
  double illum_low = 0.0, illum_he = 0.0;
  double reflect_low = 0.0, reflect_he = 0.0;
  double noise_low = 0.0, noise_he = 0.0;
};

struct DecompositionResult {
  Image reflectance_low, reflectance_he;    ///< 3 channels, [0,1]
  Image illumination_low, illumination_he;  ///< 1 channel, [0,1]
  Image noise_low, noise_he;                ///< 3 channels, [-1,1]
  Image source_he;                          ///< the equalized partner input
  std::vector<LossRecord> loss_history;     ///< one entry per iteration run
  std::vector<std::string> warnings;
  bool aborted = false;                     ///< stopped early on a non-finite loss
};

/// Splits a low-light RGB image into reflectance, illumination and noise by
/// minimizing the self-supervised loss jointly with its equalized partner.
/// Requires 3 channels and a minimum side of 8 pixels.
DecompositionResult decompose(const Image& source_low, const SidConfig& cfg);

/// iteration,total,rec_low,rec_he,rc,illum_low,illum_he,reflect_low,reflect_he,noise_low,noise_he
void write_loss_csv(const std::vector<LossRecord>& history, std::ostream& out);

}  // namespace sidnism::sid
