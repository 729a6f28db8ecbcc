#include "sidnism/sid_config.hpp"

#include <stdexcept>

namespace sidnism::sid {

std::string to_string(Mode mode) { return mode == Mode::cnn ? "cnn" : "direct"; }

Mode parse_mode(const std::string& text) {
  if (text == "cnn") return Mode::cnn;
  if (text == "direct") return Mode::direct;
  throw std::invalid_argument("unknown mode '" + text + "' (expected cnn or direct)");
}

void SidConfig::validate() const {
  auto weight = [](double v, const char* name) {
    if (!(v >= 0.0 && v < 1.0)) {
      throw std::invalid_argument(std::string(name) + " must lie in [0, 1)");
    }
  };
  weight(lambda_rc, "lambda_rc");
  weight(lambda_illum, "lambda_illum");
  weight(lambda_reflect, "lambda_reflect");
  weight(lambda_noise, "lambda_noise");
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1)");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be > 0");
  if (channels < 1) throw std::invalid_argument("channels must be >= 1");
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
}

}  // namespace sidnism::sid
