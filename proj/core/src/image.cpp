#include "sidnism/image.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sidnism {

namespace {

void check_channels(std::size_t channels) {
  if (channels != 1 && channels != 3) {
    throw std::invalid_argument("image channels must be 1 or 3, got " + std::to_string(channels));
  }
}

}  // namespace

Image::Image(std::size_t height, std::size_t width, std::size_t channels, double fill)
    : height_(height), width_(width), channels_(channels), data_(height * width * channels, fill) {
  check_channels(channels);
}

Image::Image(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_channels(channels);
  if (data_.size() != height * width * channels) {
    throw std::invalid_argument("image data length does not match height*width*channels");
  }
}

bool Image::in_unit_range() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double s) { return s >= 0.0 && s <= 1.0; });
}

Image Image::channel(std::size_t c) const {
  if (c >= channels_) throw std::out_of_range("channel index out of range");
  Image out(height_, width_, 1);
  for (std::size_t i = 0; i < pixel_count(); ++i) out.data_[i] = data_[i * channels_ + c];
  return out;
}

std::vector<double> Image::to_planar() const {
  std::vector<double> planar(data_.size());
  const std::size_t n = pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < channels_; ++c) planar[c * n + i] = data_[i * channels_ + c];
  }
  return planar;
}

Image Image::from_planar(std::size_t height, std::size_t width, std::size_t channels,
                         std::span<const double> planar) {
  Image out(height, width, channels);
  const std::size_t n = height * width;
  if (planar.size() != n * channels) {
    throw std::invalid_argument("planar buffer length does not match image shape");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < channels; ++c) out.data_[i * channels + c] = planar[c * n + i];
  }
  return out;
}

}  // namespace sidnism
