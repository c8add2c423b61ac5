#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace varsearch {

/// Dense row-major (rows, cols, channels) grid of doubles.
///
/// Used both for per-scale residual maps and for the accumulated feature map.
/// Element (r, c, ch) lives at ((r * cols) + c) * channels + ch.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t rows, std::size_t cols, std::size_t channels, double fill = 0.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(std::size_t r, std::size_t c, std::size_t ch) {
    return data_[(r * cols_ + c) * channels_ + ch];
  }
  double at(std::size_t r, std::size_t c, std::size_t ch) const {
    return data_[(r * cols_ + c) * channels_ + ch];
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const Tensor3& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && channels_ == other.channels_;
  }

  Tensor3& operator+=(const Tensor3& other);
  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

/// Single-channel pixel grid with values nominally in [0, 1].
class Image {
 public:
  Image() = default;
  Image(std::size_t rows, std::size_t cols, double fill = 0.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Resampling between grids. Source cell for destination index i along an
// axis of length n from a source axis of length m is floor(i * m / n)
// (nearest-neighbor replication). Downsampling averages each source cell's
// preimage under that map, so downsample(upsample(x)) == x whenever the
// destination is at least as large as the source.

Tensor3 upsample_nearest(const Tensor3& src, std::size_t rows, std::size_t cols);
Tensor3 downsample_box(const Tensor3& src, std::size_t rows, std::size_t cols);
Image upsample_nearest(const Image& src, std::size_t rows, std::size_t cols);
Image downsample_box(const Image& src, std::size_t rows, std::size_t cols);

double mean_squared_error(const Image& a, const Image& b);

/// FNV-1a over the raw IEEE-754 bytes; equal hashes are used as the
/// bit-exactness witness in run records.
std::uint64_t content_hash(std::span<const double> values);

}  // namespace varsearch
