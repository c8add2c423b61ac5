#include "varsearch/tensor.hpp"

#include <bit>
#include <stdexcept>

namespace varsearch {

namespace {

std::vector<std::size_t> nearest_source_map(std::size_t dst, std::size_t src) {
  std::vector<std::size_t> map(dst);
  for (std::size_t i = 0; i < dst; ++i) {
    map[i] = (i * src) / dst;
  }
  return map;
}

void require_upsample(std::size_t src_rows, std::size_t src_cols, std::size_t rows,
                      std::size_t cols) {
  if (rows < src_rows || cols < src_cols || src_rows == 0 || src_cols == 0) {
    throw std::invalid_argument("upsample_nearest: target must be at least the source size");
  }
}

void require_downsample(std::size_t src_rows, std::size_t src_cols, std::size_t rows,
                        std::size_t cols) {
  if (rows > src_rows || cols > src_cols || rows == 0 || cols == 0) {
    throw std::invalid_argument("downsample_box: target must be nonempty and at most the source size");
  }
}

}  // namespace

Tensor3::Tensor3(std::size_t rows, std::size_t cols, std::size_t channels, double fill)
    : rows_(rows), cols_(cols), channels_(channels), data_(rows * cols * channels, fill) {}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
  if (!same_shape(other)) {
    throw std::invalid_argument("Tensor3::operator+=: shape mismatch");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    data_[i] += other.data_[i];
  }
  return *this;
}

Image::Image(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Tensor3 upsample_nearest(const Tensor3& src, std::size_t rows, std::size_t cols) {
  require_upsample(src.rows(), src.cols(), rows, cols);
  const auto rmap = nearest_source_map(rows, src.rows());
  const auto cmap = nearest_source_map(cols, src.cols());
  const std::size_t d = src.channels();
  Tensor3 out(rows, cols, d);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t ch = 0; ch < d; ++ch) {
        out.at(r, c, ch) = src.at(rmap[r], cmap[c], ch);
      }
    }
  }
  return out;
}

Tensor3 downsample_box(const Tensor3& src, std::size_t rows, std::size_t cols) {
  require_downsample(src.rows(), src.cols(), rows, cols);
  const auto rmap = nearest_source_map(src.rows(), rows);
  const auto cmap = nearest_source_map(src.cols(), cols);
  const std::size_t d = src.channels();
  Tensor3 out(rows, cols, d);
  std::vector<double> counts(rows * cols, 0.0);
  for (std::size_t r = 0; r < src.rows(); ++r) {
    for (std::size_t c = 0; c < src.cols(); ++c) {
      counts[rmap[r] * cols + cmap[c]] += 1.0;
      for (std::size_t ch = 0; ch < d; ++ch) {
        out.at(rmap[r], cmap[c], ch) += src.at(r, c, ch);
      }
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t ch = 0; ch < d; ++ch) {
        out.at(r, c, ch) /= counts[r * cols + c];
      }
    }
  }
  return out;
}

Image upsample_nearest(const Image& src, std::size_t rows, std::size_t cols) {
  require_upsample(src.rows(), src.cols(), rows, cols);
  const auto rmap = nearest_source_map(rows, src.rows());
  const auto cmap = nearest_source_map(cols, src.cols());
  Image out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out.at(r, c) = src.at(rmap[r], cmap[c]);
    }
  }
  return out;
}

Image downsample_box(const Image& src, std::size_t rows, std::size_t cols) {
  require_downsample(src.rows(), src.cols(), rows, cols);
  const auto rmap = nearest_source_map(src.rows(), rows);
  const auto cmap = nearest_source_map(src.cols(), cols);
  Image out(rows, cols);
  std::vector<double> counts(rows * cols, 0.0);
  for (std::size_t r = 0; r < src.rows(); ++r) {
    for (std::size_t c = 0; c < src.cols(); ++c) {
      out.at(rmap[r], cmap[c]) += src.at(r, c);
      counts[rmap[r] * cols + cmap[c]] += 1.0;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] /= counts[i];
  }
  return out;
}

double mean_squared_error(const Image& a, const Image& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("mean_squared_error: shape mismatch");
  }
  double acc = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double diff = av[i] - bv[i];
    acc += diff * diff;
  }
  return av.empty() ? 0.0 : acc / static_cast<double>(av.size());
}

std::uint64_t content_hash(std::span<const double> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace varsearch
