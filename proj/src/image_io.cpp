// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/image_io.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

#include "prnu/errors.hpp"

namespace prnu {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::vector<ImagePlane> split_channels(const std::vector<double>& interleaved, std::size_t h, std::size_t w,
                                       std::size_t samples) {
  const std::size_t keep = samples >= 3 ? 3 : 1;
  std::vector<ImagePlane> out(keep, ImagePlane(h, w));
  for (std::size_t i = 0; i < h * w; ++i)
    for (std::size_t c = 0; c < keep; ++c) out[c][i] = interleaved[i * samples + c];
  return out;
}

struct PngBuffer {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

void png_read_memory(png_structp png, png_bytep out, png_size_t n) {
  auto* buf = static_cast<PngBuffer*>(png_get_io_ptr(png));
  if (buf->pos + n > buf->size) png_error(png, "truncated stream");
  std::memcpy(out, buf->data + buf->pos, n);
  buf->pos += n;
}

void png_silent_warning(png_structp, png_const_charp) {}

std::vector<ImagePlane> load_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw IoError("not a PNG file: " + path.string());

  PngBuffer buf{bytes.data(), bytes.size(), 0};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_silent_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng initialization failed");
  }
  // Everything touched after setjmp lives on the heap or is set before it.
  auto rows = std::make_unique<std::vector<png_bytep>>();
  auto pixels = std::make_unique<std::vector<std::uint8_t>>();
  png_uint_32 width = 0, height = 0;
  int depth = 0, channels = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("corrupt PNG: " + path.string());
  }
  png_set_read_fn(png, &buf, png_read_memory);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  depth = png_get_bit_depth(png, info);
  channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  pixels->resize(stride * height);
  rows->resize(height);
  for (png_uint_32 r = 0; r < height; ++r) (*rows)[r] = pixels->data() + r * stride;
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (depth != 8 && depth != 16) throw IoError("unsupported PNG bit depth in " + path.string());
  const std::size_t n = static_cast<std::size_t>(width) * height * static_cast<std::size_t>(channels);
  std::vector<double> samples(n);
  if (depth == 8) {
    for (std::size_t i = 0; i < n; ++i) samples[i] = (*pixels)[i] / 255.0;
  } else {
    for (std::size_t i = 0; i < n; ++i)
      samples[i] = static_cast<double>(((*pixels)[2 * i] << 8) | (*pixels)[2 * i + 1]) / 65535.0;
  }
  return split_channels(samples, height, width, static_cast<std::size_t>(channels));
}

void tiff_silent(const char*, const char*, va_list) {}

std::vector<ImagePlane> load_tiff(const std::filesystem::path& path) {
  TIFFSetErrorHandler(tiff_silent);
  TIFFSetWarningHandler(tiff_silent);
  std::unique_ptr<TIFF, void (*)(TIFF*)> tif(TIFFOpen(path.c_str(), "r"), TIFFClose);
  if (!tif) throw IoError("cannot open TIFF " + path.string());
  std::uint32_t width = 0, height = 0;
  std::uint16_t depth = 8, samples = 1, planar = PLANARCONFIG_CONTIG, format = SAMPLEFORMAT_UINT;
  TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &width);
  TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &height);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &depth);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &samples);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLEFORMAT, &format);
  if (width == 0 || height == 0) throw IoError("empty TIFF " + path.string());
  if ((depth != 8 && depth != 16) || format != SAMPLEFORMAT_UINT || planar != PLANARCONFIG_CONTIG ||
      (samples != 1 && samples != 3 && samples != 4))
    throw IoError("unsupported TIFF layout in " + path.string());

  const std::size_t per_row = static_cast<std::size_t>(width) * samples;
  std::vector<std::uint8_t> line(static_cast<std::size_t>(TIFFScanlineSize(tif.get())));
  std::vector<double> values(per_row * height);
  const double norm = depth == 8 ? 255.0 : 65535.0;
  for (std::uint32_t r = 0; r < height; ++r) {
    if (TIFFReadScanline(tif.get(), line.data(), r, 0) < 0) throw IoError("corrupt TIFF: " + path.string());
    double* dst = values.data() + r * per_row;
    if (depth == 8) {
      for (std::size_t i = 0; i < per_row; ++i) dst[i] = line[i] / norm;
    } else {
      for (std::size_t i = 0; i < per_row; ++i) {
        std::uint16_t v;
        std::memcpy(&v, line.data() + 2 * i, 2);  // libtiff returns host order
        dst[i] = v / norm;
      }
    }
  }
  return split_channels(values, height, width, samples);
}

}  // namespace

bool is_image_file(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  return ext == ".png" || ext == ".tif" || ext == ".tiff" || ext == ".bin";
}

std::vector<ImagePlane> load_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".tif" || ext == ".tiff") return load_tiff(path);
  if (ext == ".bin") {
    try {
      return {read_plane(path)};
    } catch (const InvalidArgument& e) {
      throw IoError(std::string("corrupt plane file: ") + e.what());
    }
  }
  throw IoError("unsupported image type: " + path.string());
}

void write_png16(const std::filesystem::path& path, const std::vector<ImagePlane>& channels) {
  require(channels.size() == 1 || channels.size() == 3, "write_png16: need 1 or 3 channels");
  for (const auto& c : channels) require(c.same_shape(channels[0]), "write_png16: channel shapes differ");
  const std::size_t h = channels[0].height(), w = channels[0].width(), nc = channels.size();
  std::vector<std::uint8_t> pixels(h * w * nc * 2);
  for (std::size_t i = 0; i < h * w; ++i)
    for (std::size_t c = 0; c < nc; ++c) {
      const double v = std::clamp(channels[c][i], 0.0, 1.0);
      const auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
      pixels[2 * (i * nc + c)] = static_cast<std::uint8_t>(q >> 8);
      pixels[2 * (i * nc + c) + 1] = static_cast<std::uint8_t>(q & 0xff);
    }

  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), std::fclose);
  if (!fp) throw IoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_silent_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialization failed");
  }
  auto rows = std::make_unique<std::vector<png_bytep>>(h);
  for (std::size_t r = 0; r < h; ++r) (*rows)[r] = pixels.data() + r * w * nc * 2;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encoding failed for " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 16,
               nc == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows->data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace prnu
