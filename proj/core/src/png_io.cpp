#include "sidnism/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace sidnism {

namespace {

struct MemoryReader {
  const unsigned char* data;
  std::size_t size;
  std::size_t offset;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* src = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (src->offset + count > src->size) png_error(png, "unexpected end of PNG stream");
  std::memcpy(out, src->data + src->offset, count);
  src->offset += count;
}

void quiet_warning(png_structp, png_const_charp) {}

enum class DecodeStatus { ok, unsupported, corrupt };

struct Decoded {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int channels = 0;
  std::vector<unsigned char> pixels;  // rows as stored (16-bit big endian)
  std::vector<png_bytep> rows;
  char message[128] = {};
};

[[noreturn]] void record_error(png_structp png, png_const_charp message) {
  auto* out = static_cast<Decoded*>(png_get_error_ptr(png));
  std::snprintf(out->message, sizeof(out->message), "%s", message);
  png_longjmp(png, 1);
}

// libpng reports errors with longjmp; keep non-trivial locals out of this frame.
DecodeStatus decode(const std::vector<unsigned char>& bytes, Decoded* out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, out, record_error, quiet_warning);
  if (png == nullptr) return DecodeStatus::corrupt;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return DecodeStatus::corrupt;
  }
  MemoryReader reader{bytes.data(), bytes.size(), 0};

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return DecodeStatus::corrupt;
  }
  png_set_read_fn(png, &reader, read_from_memory);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (bit_depth != 8 && bit_depth != 16) {
    std::snprintf(out->message, sizeof(out->message), "unsupported bit depth %d", bit_depth);
    png_destroy_read_struct(&png, &info, nullptr);
    return DecodeStatus::unsupported;
  }
  int channels = 0;
  switch (color_type) {
    case PNG_COLOR_TYPE_GRAY:
      channels = 1;
      break;
    case PNG_COLOR_TYPE_GRAY_ALPHA:
      channels = 1;
      png_set_strip_alpha(png);
      break;
    case PNG_COLOR_TYPE_RGB:
      channels = 3;
      break;
    case PNG_COLOR_TYPE_RGB_ALPHA:
      channels = 3;
      png_set_strip_alpha(png);
      break;
    default:
      std::snprintf(out->message, sizeof(out->message), "unsupported color type %d", color_type);
      png_destroy_read_struct(&png, &info, nullptr);
      return DecodeStatus::unsupported;
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  out->width = png_get_image_width(png, info);
  out->height = png_get_image_height(png, info);
  out->bit_depth = bit_depth;
  out->channels = channels;
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  out->pixels.resize(row_bytes * out->height);
  out->rows.resize(out->height);
  for (png_uint_32 y = 0; y < out->height; ++y) out->rows[y] = out->pixels.data() + y * row_bytes;
  png_read_image(png, out->rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return DecodeStatus::ok;
}

}  // namespace

unsigned char quantize_u8(double sample) noexcept {
  const double clamped = std::clamp(sample, 0.0, 1.0);
  return static_cast<unsigned char>(std::round(clamped * 255.0));
}

Image load_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ImageIoError(ImageIoError::Kind::missing_file, "cannot open " + path.string());
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw ImageIoError(ImageIoError::Kind::corrupt_stream, path.string() + ": not a PNG stream");
  }

  Decoded decoded;
  switch (decode(bytes, &decoded)) {
    case DecodeStatus::unsupported:
      throw ImageIoError(ImageIoError::Kind::unsupported_format,
                         path.string() + ": " + decoded.message);
    case DecodeStatus::corrupt:
      throw ImageIoError(ImageIoError::Kind::corrupt_stream,
                         path.string() + ": corrupt PNG stream: " + decoded.message);
    case DecodeStatus::ok:
      break;
  }

  const std::size_t n = static_cast<std::size_t>(decoded.width) * decoded.height * decoded.channels;
  std::vector<double> samples(n);
  if (decoded.bit_depth == 8) {
    for (std::size_t i = 0; i < n; ++i) samples[i] = decoded.pixels[i] / 255.0;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned v = (unsigned{decoded.pixels[2 * i]} << 8) | decoded.pixels[2 * i + 1];
      samples[i] = v / 65535.0;
    }
  }
  return Image(decoded.height, decoded.width, static_cast<std::size_t>(decoded.channels),
               std::move(samples));
}

void save_png(const Image& img, const std::filesystem::path& path) {
  if (img.empty()) throw std::invalid_argument("cannot save an empty image");
  std::vector<unsigned char> bytes(img.size());
  std::transform(img.data().begin(), img.data().end(), bytes.begin(), quantize_u8);

  png_image desc;
  std::memset(&desc, 0, sizeof(desc));
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(img.width());
  desc.height = static_cast<png_uint_32>(img.height());
  desc.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

  const std::string file = path.string();
  if (png_image_write_to_file(&desc, file.c_str(), 0, bytes.data(), 0, nullptr) == 0) {
    const std::string reason = desc.message;
    png_image_free(&desc);
    throw ImageIoError(ImageIoError::Kind::write_failed, file + ": " + reason);
  }
}

}  // namespace sidnism
