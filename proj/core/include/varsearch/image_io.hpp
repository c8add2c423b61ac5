#pragma once

#include <filesystem>
#include <iosfwd>

#include "varsearch/tensor.hpp"

namespace varsearch {

enum class PgmEncoding { kPlain, kBinary };  // P2 / P5

/// Reads a P2 or P5 portable graymap; pixel values are divided by maxval.
Image read_pgm(std::istream& in);
Image read_pgm(const std::filesystem::path& path);

/// Writes values clamped to [0, 1] and quantized to `maxval` (<= 65535).
void write_pgm(std::ostream& out, const Image& image, PgmEncoding encoding = PgmEncoding::kBinary,
               unsigned maxval = 65535);
void write_pgm(const std::filesystem::path& path, const Image& image,
               PgmEncoding encoding = PgmEncoding::kBinary, unsigned maxval = 65535);

}  // namespace varsearch
