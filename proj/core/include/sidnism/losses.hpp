#pragma once

#include <vector>

#include "sidnism/image.hpp"
#include "sidnism/ops.hpp"
#include "sidnism/sid_config.hpp"

namespace sidnism::sid {

/// Decomposed maps on a tape: R [3,H,W], L [1,H,W], N [3,H,W].
struct Maps {
  ad::Tensor reflectance;
  ad::Tensor illumination;
  ad::Tensor noise;
};

/// Quantities derived once from a fixed source image, stored planar and
/// materialized as constants on whichever tape evaluates the loss.
struct SourceTargets {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> image;        ///< S, [3,H,W]
  std::vector<double> grad_h;       ///< suppressed horizontal gradient of S, [3,H,W]
  std::vector<double> grad_v;       ///< suppressed vertical gradient of S, [3,H,W]
  std::vector<double> hue;          ///< hue of S, [1,H,W]
  std::vector<double> chroma_mask;  ///< 1 where S has a defined hue, [1,H,W]

  ad::Tensor image_on(ad::Tape& tape) const;
};

SourceTargets make_targets(const Image& source, double epsilon);

/// Zeroes samples with |g| < epsilon.
std::vector<double> suppress_small_gradients(std::vector<double> gradient, double epsilon);

/// Fixed edge weights exp(-alpha * edge) for both difference directions.
struct EdgeWeights {
  ad::Shape shape;
  std::vector<double> horizontal;
  std::vector<double> vertical;
};

/// exp(-alpha * channel-mean |grad R|), read from R's current values.
EdgeWeights structure_weights(const ad::Tensor& reflectance, double alpha);
/// exp(-alpha * (|grad L_low| + |grad L_he|)), read from current values.
EdgeWeights mutual_weights(const ad::Tensor& illum_low, const ad::Tensor& illum_he, double alpha);

/// mean |R*L + N - S|, L broadcast over channels.
ad::Tensor loss_rec(const ad::Tensor& r, const ad::Tensor& l, const ad::Tensor& n, const ad::Tensor& s);
/// mean |R_low - R_he|.
ad::Tensor loss_rc(const ad::Tensor& r_low, const ad::Tensor& r_he);
/// Structure-aware plus mutual-edge weighted TV of L; weights are constants.
ad::Tensor loss_illum(const ad::Tensor& l_self, const EdgeWeights& structure, const EdgeWeights& mutual);
ad::Tensor loss_illum(const ad::Tensor& l_self, const ad::Tensor& r_self, const ad::Tensor& l_low,
                      const ad::Tensor& l_he, double alpha);
/// Gradient-amplification residual plus circular hue distance, both
/// normalized by sqrt(H*W).
ad::Tensor loss_reflect(const ad::Tensor& r, const SourceTargets& targets, double beta);
/// |S * N|_F / sqrt(element count).
ad::Tensor loss_noise(const ad::Tensor& s, const ad::Tensor& n);

/// Differentiable hue of a [3,H,W] tensor, [1,H,W] output.
ad::Tensor hue(const ad::Tensor& rgb);

struct FrozenWeights {
  EdgeWeights structure_low;
  EdgeWeights structure_he;
  EdgeWeights mutual;
};

FrozenWeights freeze_weights(const Maps& low, const Maps& he, double alpha);

struct LossTerms {
  ad::Tensor total;
  ad::Tensor rec_low, rec_he;
  ad::Tensor rc;
  ad::Tensor illum_low, illum_he;
  ad::Tensor reflect_low, reflect_he;
  ad::Tensor noise_low, noise_he;
};

LossTerms total_loss(const Maps& low, const Maps& he, const SourceTargets& targets_low,
                     const SourceTargets& targets_he, const FrozenWeights& weights,
                     const SidConfig& cfg);
/// Freezes the edge weights from the current map values first.
LossTerms total_loss(const Maps& low, const Maps& he, const SourceTargets& targets_low,
                     const SourceTargets& targets_he, const SidConfig& cfg);

}  // namespace sidnism::sid
