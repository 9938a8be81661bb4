// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#include "prnu/image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "prnu/errors.hpp"
#include "prnu/simd.hpp"

namespace prnu {

namespace {

constexpr char kMagic[8] = {'P', 'R', 'N', 'U', 'P', 'L', 'N', '1'};
constexpr std::size_t kHeaderBytes = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

ImagePlane::ImagePlane(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width) {
  require(height >= 1 && width >= 1, "ImagePlane: dimensions must be at least 1x1");
  data_.assign(height * width, fill);
}

ImagePlane::ImagePlane(std::size_t height, std::size_t width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  require(height >= 1 && width >= 1, "ImagePlane: dimensions must be at least 1x1");
  require(data_.size() == height * width, "ImagePlane: data length does not match height*width");
}

ImagePlane ImagePlane::crop(std::size_t row0, std::size_t col0, std::size_t h, std::size_t w) const {
  require(h >= 1 && w >= 1, "crop: empty window");
  require(row0 + h <= height_ && col0 + w <= width_, "crop: window exceeds plane");
  ImagePlane out(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    const double* src = data_.data() + (row0 + r) * width_ + col0;
    std::copy(src, src + w, out.data() + r * w);
  }
  return out;
}

bool ImagePlane::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double ImagePlane::sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

double ImagePlane::energy() const { return simd::dot(data_.data(), data_.data(), data_.size()); }

double ImagePlane::min() const { return *std::min_element(data_.begin(), data_.end()); }
double ImagePlane::max() const { return *std::max_element(data_.begin(), data_.end()); }

ImagePlane& ImagePlane::operator+=(const ImagePlane& other) {
  require(same_shape(other), "plane addition: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ImagePlane& ImagePlane::operator-=(const ImagePlane& other) {
  require(same_shape(other), "plane subtraction: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ImagePlane& ImagePlane::operator*=(double scale) {
  for (double& v : data_) v *= scale;
  return *this;
}

ImagePlane& ImagePlane::operator+=(double offset) {
  for (double& v : data_) v += offset;
  return *this;
}

ImagePlane operator+(ImagePlane a, const ImagePlane& b) { return a += b; }
ImagePlane operator-(ImagePlane a, const ImagePlane& b) { return a -= b; }
ImagePlane operator*(ImagePlane a, double s) { return a *= s; }

ImagePlane hadamard(const ImagePlane& a, const ImagePlane& b) {
  require(a.same_shape(b), "hadamard: shape mismatch");
  ImagePlane out(a.height(), a.width());
  simd::mul(a.data(), b.data(), out.data(), a.size());
  return out;
}

std::vector<std::uint8_t> encode_plane(const ImagePlane& plane) {
  require(!plane.empty(), "encode_plane: empty plane");
  require(plane.height() <= std::numeric_limits<std::uint32_t>::max() &&
              plane.width() <= std::numeric_limits<std::uint32_t>::max(),
          "encode_plane: dimensions exceed 32-bit range");
  std::vector<std::uint8_t> out(sizeof kMagic);
  std::memcpy(out.data(), kMagic, sizeof kMagic);
  out.reserve(kHeaderBytes + 8 * plane.size());
  put_u32(out, static_cast<std::uint32_t>(plane.height()));
  put_u32(out, static_cast<std::uint32_t>(plane.width()));
  for (double v : plane.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

ImagePlane decode_plane(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw IoError("decode_plane: missing PRNUPLN1 header");
  const std::size_t h = get_u32(bytes.data() + 8);
  const std::size_t w = get_u32(bytes.data() + 12);
  if (h == 0 || w == 0) throw IoError("decode_plane: zero dimension");
  if (bytes.size() != kHeaderBytes + 8 * h * w) throw IoError("decode_plane: truncated or oversized payload");
  std::vector<double> data(h * w);
  const std::uint8_t* p = bytes.data() + kHeaderBytes;
  for (std::size_t i = 0; i < data.size(); ++i, p += 8) data[i] = std::bit_cast<double>(get_u64(p));
  return ImagePlane(h, w, std::move(data));
}

void write_plane(const std::filesystem::path& path, const ImagePlane& plane) {
  const auto bytes = encode_plane(plane);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

ImagePlane read_plane(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_plane(bytes);
}

std::uint64_t plane_digest(const ImagePlane& plane, std::uint64_t seed) {
  std::uint64_t h = seed;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(plane.height());
  mix(plane.width());
  for (double v : plane.values()) mix(std::bit_cast<std::uint64_t>(v));
  return h;
}

}  // namespace prnu
