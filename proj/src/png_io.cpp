#include "sarcam/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <memory>

#include "sarcam/error.hpp"

namespace sarcam {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void on_png_error(png_structp png, png_const_charp msg) {
  auto* message = static_cast<std::string*>(png_get_error_ptr(png));
  if (message) *message = msg;
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

}  // namespace

ImageGrid read_png_gray(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error(ErrorKind::MissingFile, "cannot open " + path.string());

  unsigned char sig[8] = {};
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw Error(ErrorKind::UnsupportedFormat, path.string() + " is not a PNG file");
  }

  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, on_png_error, on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::IoFailure, "libpng initialisation failed");
  }

  // Everything touched after setjmp lives outside this frame or is trivially
  // destructible, so longjmp out of libpng is safe.
  std::vector<png_bytep> rows;
  std::vector<unsigned char> pixels;
  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0, channels = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::UnsupportedFormat, path.string() + ": " + message);
  }

  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  png_get_IHDR(png, info, &width, &height, &bit_depth, &color_type, nullptr, nullptr, nullptr);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (bit_depth == 16) png_set_swap(png);
  png_read_update_info(png, info);

  bit_depth = png_get_bit_depth(png, info);
  channels = png_get_channels(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  pixels.resize(row_bytes * height);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = pixels.data() + r * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3) {
    throw Error(ErrorKind::UnsupportedFormat, path.string() + ": unsupported channel count " + std::to_string(channels));
  }
  const double max_code = bit_depth == 16 ? 65535.0 : 255.0;
  ImageGrid out(static_cast<int>(height), static_cast<int>(width));
  for (png_uint_32 r = 0; r < height; ++r) {
    for (png_uint_32 c = 0; c < width; ++c) {
      double sum = 0.0;
      for (int ch = 0; ch < channels; ++ch) {
        const std::size_t idx = static_cast<std::size_t>(c) * channels + ch;
        if (bit_depth == 16) {
          std::uint16_t v;
          std::memcpy(&v, rows[r] + idx * 2, 2);
          sum += v;
        } else {
          sum += rows[r][idx];
        }
      }
      out(static_cast<int>(r), static_cast<int>(c)) = static_cast<float>(sum / channels / max_code);
    }
  }
  return out;
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  if (image.height <= 0 || image.width <= 0) throw Error(ErrorKind::InvalidArgument, "cannot write an empty PNG");
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());

  std::string message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, on_png_error, on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::IoFailure, "libpng initialisation failed");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::IoFailure, path.string() + ": " + message);
  }
  png_init_io(png, file.get());
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < image.height; ++r) {
    rows[static_cast<std::size_t>(r)] = const_cast<png_bytep>(image.pixel(r, 0));
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace sarcam
