#include "sidnism/losses.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sidnism/image_ops.hpp"

namespace sidnism::sid {

using ad::Axis;
using ad::Shape;
using ad::Tape;
using ad::Tensor;

namespace {

void require_same(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " + ad::to_string(a.shape()) +
                                " vs " + ad::to_string(b.shape()));
  }
}

void require_spatial(const Tensor& a, const Tensor& b, const char* what) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.size() != 3 || sb.size() != 3 || sa[1] != sb[1] || sa[2] != sb[2]) {
    throw std::invalid_argument(std::string(what) + ": spatial size mismatch " + ad::to_string(sa) +
                                " vs " + ad::to_string(sb));
  }
}

std::vector<double> copy_values(const Tensor& t) {
  const auto v = t.values();
  return {v.begin(), v.end()};
}

Shape planar_shape(std::size_t channels, std::size_t h, std::size_t w) { return {channels, h, w}; }

Tensor weighted_tv(const Tensor& l, const EdgeWeights& weights) {
  Tape& tape = l.tape();
  const Tensor wh = tape.constant(weights.shape, weights.horizontal);
  const Tensor wv = tape.constant(weights.shape, weights.vertical);
  return ad::mean(ad::abs(ad::spatial_diff(l, Axis::horizontal) * wh)) +
         ad::mean(ad::abs(ad::spatial_diff(l, Axis::vertical) * wv));
}

}  // namespace

Tensor SourceTargets::image_on(Tape& tape) const {
  return tape.constant(planar_shape(3, height, width), image);
}

std::vector<double> suppress_small_gradients(std::vector<double> gradient, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("suppression threshold must be >= 0");
  for (double& g : gradient) {
    if (std::abs(g) < epsilon) g = 0.0;
  }
  return gradient;
}

SourceTargets make_targets(const Image& source, double epsilon) {
  if (source.channels() != 3) throw std::invalid_argument("source image must have 3 channels");
  SourceTargets t;
  t.height = source.height();
  t.width = source.width();
  t.image = source.to_planar();
  const Gradients g = spatial_gradients(source);
  t.grad_h = suppress_small_gradients(g.horizontal.to_planar(), epsilon);
  t.grad_v = suppress_small_gradients(g.vertical.to_planar(), epsilon);
  t.hue.resize(source.pixel_count());
  t.chroma_mask.resize(source.pixel_count());
  const auto s = source.data();
  for (std::size_t i = 0; i < source.pixel_count(); ++i) {
    const double r = s[3 * i], gr = s[3 * i + 1], b = s[3 * i + 2];
    t.hue[i] = hue_angle(r, gr, b);
    const bool achromatic = (gr - b) == 0.0 && (2.0 * r - gr - b) == 0.0;
    t.chroma_mask[i] = achromatic ? 0.0 : 1.0;
  }
  return t;
}

EdgeWeights structure_weights(const Tensor& reflectance, double alpha) {
  const Tensor r = ad::detach(reflectance);
  EdgeWeights w;
  const Tensor h = ad::exp(ad::channel_mean(ad::abs(ad::spatial_diff(r, Axis::horizontal))) * -alpha);
  const Tensor v = ad::exp(ad::channel_mean(ad::abs(ad::spatial_diff(r, Axis::vertical))) * -alpha);
  w.shape = h.shape();
  w.horizontal = copy_values(h);
  w.vertical = copy_values(v);
  return w;
}

EdgeWeights mutual_weights(const Tensor& illum_low, const Tensor& illum_he, double alpha) {
  require_same(illum_low, illum_he, "mutual_weights");
  const Tensor a = ad::detach(illum_low);
  const Tensor b = ad::detach(illum_he);
  auto edge = [&](Axis axis) {
    return ad::exp((ad::abs(ad::spatial_diff(a, axis)) + ad::abs(ad::spatial_diff(b, axis))) * -alpha);
  };
  const Tensor h = edge(Axis::horizontal);
  const Tensor v = edge(Axis::vertical);
  EdgeWeights w;
  w.shape = h.shape();
  w.horizontal = copy_values(h);
  w.vertical = copy_values(v);
  return w;
}

Tensor loss_rec(const Tensor& r, const Tensor& l, const Tensor& n, const Tensor& s) {
  require_same(r, n, "loss_rec");
  require_same(r, s, "loss_rec");
  require_spatial(r, l, "loss_rec");
  if (l.shape()[0] != 1) throw std::invalid_argument("loss_rec: illumination must have one channel");
  return ad::mean(ad::abs(r * l + n - s));
}

Tensor loss_rc(const Tensor& r_low, const Tensor& r_he) {
  require_same(r_low, r_he, "loss_rc");
  return ad::mean(ad::abs(r_low - r_he));
}

Tensor loss_illum(const Tensor& l_self, const EdgeWeights& structure, const EdgeWeights& mutual) {
  if (structure.shape != l_self.shape() || mutual.shape != l_self.shape()) {
    throw std::invalid_argument("loss_illum: weight shape does not match illumination shape");
  }
  return weighted_tv(l_self, structure) + weighted_tv(l_self, mutual);
}

Tensor loss_illum(const Tensor& l_self, const Tensor& r_self, const Tensor& l_low, const Tensor& l_he,
                  double alpha) {
  require_spatial(l_self, r_self, "loss_illum");
  require_same(l_self, l_low, "loss_illum");
  require_same(l_self, l_he, "loss_illum");
  return loss_illum(l_self, structure_weights(r_self, alpha), mutual_weights(l_low, l_he, alpha));
}

Tensor hue(const Tensor& rgb) {
  if (rgb.shape().size() != 3 || rgb.shape()[0] != 3) {
    throw std::invalid_argument("hue expects a [3,H,W] tensor, got " + ad::to_string(rgb.shape()));
  }
  const Tensor r = ad::channel(rgb, 0);
  const Tensor g = ad::channel(rgb, 1);
  const Tensor b = ad::channel(rgb, 2);
  return ad::atan2((g - b) * std::numbers::sqrt3, r * 2.0 - g - b);
}

Tensor loss_reflect(const Tensor& r, const SourceTargets& targets, double beta) {
  const Shape s = r.shape();
  if (s != planar_shape(3, targets.height, targets.width)) {
    throw std::invalid_argument("loss_reflect: reflectance shape " + ad::to_string(s) +
                                " does not match source");
  }
  Tape& tape = r.tape();
  const double root_pixels = std::sqrt(static_cast<double>(targets.height * targets.width));

  const Tensor target_h = tape.constant(s, targets.grad_h);
  const Tensor target_v = tape.constant(s, targets.grad_v);
  const Tensor resid_h = ad::spatial_diff(r, Axis::horizontal) - target_h * beta;
  const Tensor resid_v = ad::spatial_diff(r, Axis::vertical) - target_v * beta;
  Tensor contrast = tape.constant(0.0);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    contrast = contrast + ad::fro(ad::channel(resid_h, ch)) + ad::fro(ad::channel(resid_v, ch));
  }
  contrast = contrast * (1.0 / (3.0 * root_pixels));

  const Shape plane = planar_shape(1, targets.height, targets.width);
  const Tensor source_hue = tape.constant(plane, targets.hue);
  const Tensor mask = tape.constant(plane, targets.chroma_mask);
  const Tensor color = ad::fro(ad::wrap_angle(hue(r) - source_hue) * mask) * (1.0 / root_pixels);
  return contrast + color;
}

Tensor loss_noise(const Tensor& s, const Tensor& n) {
  require_spatial(s, n, "loss_noise");
  if (s.shape()[0] != n.shape()[0] && s.shape()[0] != 1) {
    throw std::invalid_argument("loss_noise: channel mismatch");
  }
  return ad::fro(s * n) * (1.0 / std::sqrt(static_cast<double>(n.numel())));
}

FrozenWeights freeze_weights(const Maps& low, const Maps& he, double alpha) {
  return {structure_weights(low.reflectance, alpha), structure_weights(he.reflectance, alpha),
          mutual_weights(low.illumination, he.illumination, alpha)};
}

LossTerms total_loss(const Maps& low, const Maps& he, const SourceTargets& targets_low,
                     const SourceTargets& targets_he, const FrozenWeights& weights,
                     const SidConfig& cfg) {
  Tape& tape = low.reflectance.tape();
  const Tensor s_low = targets_low.image_on(tape);
  const Tensor s_he = targets_he.image_on(tape);

  LossTerms t;
  t.rec_low = loss_rec(low.reflectance, low.illumination, low.noise, s_low);
  t.rec_he = loss_rec(he.reflectance, he.illumination, he.noise, s_he);
  t.rc = loss_rc(low.reflectance, he.reflectance);
  t.illum_low = loss_illum(low.illumination, weights.structure_low, weights.mutual);
  t.illum_he = loss_illum(he.illumination, weights.structure_he, weights.mutual);
  t.reflect_low = loss_reflect(low.reflectance, targets_low, cfg.beta);
  t.reflect_he = loss_reflect(he.reflectance, targets_he, cfg.beta);
  t.noise_low = loss_noise(s_low, low.noise);
  t.noise_he = loss_noise(s_he, he.noise);

  t.total = t.rc * cfg.lambda_rc +
            (t.rec_low + t.illum_low * cfg.lambda_illum + t.reflect_low * cfg.lambda_reflect +
             t.noise_low * cfg.lambda_noise) +
            (t.rec_he + t.illum_he * cfg.lambda_illum + t.reflect_he * cfg.lambda_reflect +
             t.noise_he * cfg.lambda_noise);
  return t;
}

LossTerms total_loss(const Maps& low, const Maps& he, const SourceTargets& targets_low,
                     const SourceTargets& targets_he, const SidConfig& cfg) {
  return total_loss(low, he, targets_low, targets_he, freeze_weights(low, he, cfg.alpha), cfg);
}

}  // namespace sidnism::sid
