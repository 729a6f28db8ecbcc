#include "sidnism/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sidnism::sid {

using ad::Parameter;
using ad::Tensor;

Maps activate(const Tensor& r_logits, const Tensor& l_logits, const Tensor& n_logits) {
  return {ad::sigmoid(r_logits), ad::sigmoid(l_logits), ad::tanh(n_logits)};
}

LogitMaps::LogitMaps(std::size_t height, std::size_t width)
    : reflectance({3, height, width}, 0.0),
      illumination({1, height, width}, 0.0),
      noise({3, height, width}, 0.0) {}

Maps LogitMaps::forward(ad::Tape& tape) {
  return activate(tape.parameter(reflectance), tape.parameter(illumination), tape.parameter(noise));
}

std::vector<Parameter*> LogitMaps::parameters() { return {&reflectance, &illumination, &noise}; }

SidNetwork::SidNetwork(int width, int depth, std::uint64_t seed) {
  if (width < 1 || depth < 1) throw std::invalid_argument("network width and depth must be >= 1");
  std::mt19937_64 rng(seed);
  auto make = [&rng](std::size_t cout, std::size_t cin) {
    const double bound = std::sqrt(6.0 / static_cast<double>(cin * 9));
    std::uniform_real_distribution<double> dist(-bound, bound);
    std::vector<double> k(cout * cin * 9);
    for (double& v : k) v = dist(rng);
    return Conv{Parameter({cout, cin, 3, 3}, std::move(k)), Parameter({cout}, 0.0)};
  };
  const auto w = static_cast<std::size_t>(width);
  layers_.push_back(make(w, 3));
  for (int i = 1; i < depth; ++i) layers_.push_back(make(w, w));
  head_r_ = make(3, w);
  head_l_ = make(1, w);
  head_n_ = make(3, w);
}

Maps SidNetwork::forward(ad::Tape& tape, const Tensor& source) {
  if (!initialized()) throw std::logic_error("SidNetwork used before initialization");
  Tensor features = source;
  for (Conv& layer : layers_) {
    features = ad::relu(ad::conv2d(features, tape.parameter(layer.kernel), tape.parameter(layer.bias)));
  }
  auto head = [&](Conv& c) { return ad::conv2d(features, tape.parameter(c.kernel), tape.parameter(c.bias)); };
  return activate(head(head_r_), head(head_l_), head(head_n_));
}

std::vector<Parameter*> SidNetwork::parameters() {
  std::vector<Parameter*> out;
  for (Conv& layer : layers_) {
    out.push_back(&layer.kernel);
    out.push_back(&layer.bias);
  }
  for (Conv* c : {&head_r_, &head_l_, &head_n_}) {
    out.push_back(&c->kernel);
    out.push_back(&c->bias);
  }
  return out;
}

}  // namespace sidnism::sid
