#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "sidnism/image.hpp"

namespace sidnism {

class ImageIoError : public std::runtime_error {
 public:
  enum class Kind { missing_file, unsupported_format, corrupt_stream, write_failed };

  ImageIoError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Reads an 8- or 16-bit grayscale/RGB PNG. Alpha is dropped, samples are
/// scaled to [0,1] by the bit-depth maximum.
Image load_png(const std::filesystem::path& path);

/// Writes an 8-bit PNG (gray or RGB). Samples are clamped to [0,1] and
/// rounded half away from zero.
void save_png(const Image& img, const std::filesystem::path& path);

/// Byte encoding used by save_png.
unsigned char quantize_u8(double sample) noexcept;

}  // namespace sidnism
