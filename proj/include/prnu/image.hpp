// Copyright 2026 The prnu-emphasis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace prnu {

/// A (row, col) displacement. Used for crop origins and correlation peaks.
struct Shift {
  long row = 0;
  long col = 0;
  auto operator<=>(const Shift&) const = default;
};

/// Row-major 2D raster of doubles. Every raster in the toolkit (scenes,
/// captures, residuals, fingerprints, correlation surfaces) is one of these.
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(std::size_t height, std::size_t width, double fill = 0.0);
  ImagePlane(std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * width_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * width_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * width_, width_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * width_, width_}; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool same_shape(const ImagePlane& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  /// Copy of the h x w window whose top-left corner is (row0, col0).
  ImagePlane crop(std::size_t row0, std::size_t col0, std::size_t h, std::size_t w) const;

  bool all_finite() const;
  double sum() const;
  double energy() const;
  double min() const;
  double max() const;

  ImagePlane& operator+=(const ImagePlane& other);
  ImagePlane& operator-=(const ImagePlane& other);
  ImagePlane& operator*=(double scale);
  ImagePlane& operator+=(double offset);

  bool operator==(const ImagePlane&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

ImagePlane operator+(ImagePlane a, const ImagePlane& b);
ImagePlane operator-(ImagePlane a, const ImagePlane& b);
ImagePlane operator*(ImagePlane a, double s);
ImagePlane hadamard(const ImagePlane& a, const ImagePlane& b);

// Shared binary format: "PRNUPLN1", u32 LE height, u32 LE width, then
// row-major f64 LE samples.
std::vector<std::uint8_t> encode_plane(const ImagePlane& plane);
ImagePlane decode_plane(std::span<const std::uint8_t> bytes);
void write_plane(const std::filesystem::path& path, const ImagePlane& plane);
ImagePlane read_plane(const std::filesystem::path& path);

/// FNV-1a over the raw sample bytes; used to order inputs canonically.
std::uint64_t plane_digest(const ImagePlane& plane, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace prnu
