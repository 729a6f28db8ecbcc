#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sidnism {

/// Dense H x W x C image, interleaved row-major samples.
///
/// Photometric images hold samples in [0,1]. Signed fields (finite
/// differences, the noise map) reuse the same container; range is not
/// enforced here, only checked by `in_unit_range()`.
class Image {
 public:
  Image() = default;
  Image(std::size_t height, std::size_t width, std::size_t channels, double fill = 0.0);
  Image(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return height_ * width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& at(std::size_t y, std::size_t x, std::size_t c = 0) {
    return data_[(y * width_ + x) * channels_ + c];
  }
  double at(std::size_t y, std::size_t x, std::size_t c = 0) const {
    return data_[(y * width_ + x) * channels_ + c];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }
  bool in_unit_range() const noexcept;

  /// Copy of one channel as a single-channel image.
  Image channel(std::size_t c) const;

  /// Planar (C x H x W) copy of the samples.
  std::vector<double> to_planar() const;
  static Image from_planar(std::size_t height, std::size_t width, std::size_t channels,
                           std::span<const double> planar);

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

}  // namespace sidnism
