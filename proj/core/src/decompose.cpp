#include "sidnism/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "sidnism/adam.hpp"
#include "sidnism/image_ops.hpp"
#include "sidnism/model.hpp"

namespace sidnism::sid {

namespace {

// Both parameterizations behind one interface for the optimization loop.
class Parameterization {
 public:
  virtual ~Parameterization() = default;
  virtual std::pair<Maps, Maps> forward(ad::Tape& tape, const SourceTargets& low,
                                        const SourceTargets& he) = 0;
  virtual std::vector<ad::Parameter*> parameters() = 0;
};

class DirectParameterization final : public Parameterization {
 public:
  DirectParameterization(std::size_t h, std::size_t w) : low_(h, w), he_(h, w) {}

  std::pair<Maps, Maps> forward(ad::Tape& tape, const SourceTargets&, const SourceTargets&) override {
    Maps low = low_.forward(tape);
    Maps he = he_.forward(tape);
    return {low, he};
  }
  std::vector<ad::Parameter*> parameters() override {
    auto out = low_.parameters();
    for (auto* p : he_.parameters()) out.push_back(p);
    return out;
  }

 private:
  LogitMaps low_;
  LogitMaps he_;
};

class NetworkParameterization final : public Parameterization {
 public:
  explicit NetworkParameterization(const SidConfig& cfg) : net_(cfg.channels, cfg.depth, cfg.seed) {}

  std::pair<Maps, Maps> forward(ad::Tape& tape, const SourceTargets& low,
                                const SourceTargets& he) override {
    Maps m_low = net_.forward(tape, low.image_on(tape));
    Maps m_he = net_.forward(tape, he.image_on(tape));
    return {m_low, m_he};
  }
  std::vector<ad::Parameter*> parameters() override { return net_.parameters(); }

 private:
  SidNetwork net_;
};

LossRecord to_record(const LossTerms& t) {
  return {t.total.item(),     t.rec_low.item(),     t.rec_he.item(),     t.rc.item(),
          t.illum_low.item(), t.illum_he.item(),    t.reflect_low.item(), t.reflect_he.item(),
          t.noise_low.item(), t.noise_he.item()};
}

bool finite(const LossRecord& r) {
  for (double v : {r.total, r.rec_low, r.rec_he, r.rc, r.illum_low, r.illum_he, r.reflect_low,
                   r.reflect_he, r.noise_low, r.noise_he}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Image to_image(const ad::Tensor& t, std::size_t h, std::size_t w) {
  return Image::from_planar(h, w, t.shape()[0], t.values());
}

}  // namespace

DecompositionResult decompose(const Image& source_low, const SidConfig& cfg) {
  cfg.validate();
  if (source_low.channels() != 3) throw std::invalid_argument("decompose expects a 3-channel image");
  const std::size_t h = source_low.height();
  const std::size_t w = source_low.width();
  if (std::min(h, w) < 8) throw std::invalid_argument("decompose needs an image of at least 8x8 pixels");

  DecompositionResult result;
  if (std::all_of(source_low.data().begin(), source_low.data().end(), [](double s) { return s <= 0.0; })) {
    result.warnings.emplace_back("input image is entirely black; decomposition is degenerate");
  }
  result.source_he = hist_equalize(source_low);
  const SourceTargets targets_low = make_targets(source_low, cfg.epsilon);
  const SourceTargets targets_he = make_targets(result.source_he, cfg.epsilon);

  std::unique_ptr<Parameterization> model;
  if (cfg.mode == Mode::cnn) {
    model = std::make_unique<NetworkParameterization>(cfg);
  } else {
    model = std::make_unique<DirectParameterization>(h, w);
  }
  const std::vector<ad::Parameter*> params = model->parameters();

  ad::AdamState adam;
  adam.options.lr = cfg.lr;
  result.loss_history.reserve(static_cast<std::size_t>(cfg.iterations));

  for (int it = 0; it < cfg.iterations; ++it) {
    for (ad::Parameter* p : params) p->zero_grad();
    ad::Tape tape;
    const auto [low, he] = model->forward(tape, targets_low, targets_he);
    const LossTerms terms = total_loss(low, he, targets_low, targets_he, cfg);
    const LossRecord record = to_record(terms);
    if (!finite(record)) {
      result.aborted = true;
      result.warnings.push_back(fmt::format("non-finite loss at iteration {}; optimization stopped", it));
      break;
    }
    result.loss_history.push_back(record);
    tape.backward(terms.total);
    ad::adam_step(params, adam);
  }

  ad::Tape tape;
  const auto [low, he] = model->forward(tape, targets_low, targets_he);
  result.reflectance_low = to_image(low.reflectance, h, w);
  result.reflectance_he = to_image(he.reflectance, h, w);
  result.illumination_low = to_image(low.illumination, h, w);
  result.illumination_he = to_image(he.illumination, h, w);
  result.noise_low = to_image(low.noise, h, w);
  result.noise_he = to_image(he.noise, h, w);
  return result;
}

void write_loss_csv(const std::vector<LossRecord>& history, std::ostream& out) {
  out << "iteration,total,rec_low,rec_he,rc,illum_low,illum_he,reflect_low,reflect_he,noise_low,noise_he\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    const LossRecord& r = history[i];
    out << fmt::format("{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", i,
                       r.total, r.rec_low, r.rec_he, r.rc, r.illum_low, r.illum_he, r.reflect_low,
                       r.reflect_he, r.noise_low, r.noise_he);
  }
}

}  // namespace sidnism::sid
