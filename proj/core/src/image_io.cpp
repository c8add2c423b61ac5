#include "varsearch/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace varsearch {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  while (in) {
    int ch = in.peek();
    if (ch == '#') {
      std::string discard;
      std::getline(in, discard);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  in >> token;
  if (token.empty()) {
    throw std::runtime_error("read_pgm: truncated header");
  }
  return token;
}

unsigned parse_unsigned(const std::string& token) {
  std::size_t pos = 0;
  const unsigned long v = std::stoul(token, &pos);
  if (pos != token.size()) {
    throw std::runtime_error("read_pgm: bad header field '" + token + "'");
  }
  return static_cast<unsigned>(v);
}

}  // namespace

Image read_pgm(std::istream& in) {
  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5") {
    throw std::runtime_error("read_pgm: unsupported magic '" + magic + "'");
  }
  const unsigned cols = parse_unsigned(next_token(in));
  const unsigned rows = parse_unsigned(next_token(in));
  const unsigned maxval = parse_unsigned(next_token(in));
  if (rows == 0 || cols == 0 || maxval == 0 || maxval > 65535) {
    throw std::runtime_error("read_pgm: invalid dimensions or maxval");
  }
  Image img(rows, cols);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (magic == "P2") {
    for (auto& v : img.values()) {
      unsigned px = 0;
      if (!(in >> px) || px > maxval) {
        throw std::runtime_error("read_pgm: bad or missing pixel");
      }
      v = px * scale;
    }
    return img;
  }
  in.get();  // single whitespace after maxval
  const bool wide = maxval > 255;
  for (auto& v : img.values()) {
    unsigned px = 0;
    const int hi = in.get();
    if (hi == EOF) {
      throw std::runtime_error("read_pgm: truncated pixel data");
    }
    px = static_cast<unsigned>(hi);
    if (wide) {
      const int lo = in.get();
      if (lo == EOF) {
        throw std::runtime_error("read_pgm: truncated pixel data");
      }
      px = (px << 8) | static_cast<unsigned>(lo);
    }
    if (px > maxval) {
      throw std::runtime_error("read_pgm: pixel exceeds maxval");
    }
    v = px * scale;
  }
  return img;
}

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_pgm: cannot open " + path.string());
  }
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const Image& image, PgmEncoding encoding, unsigned maxval) {
  if (maxval == 0 || maxval > 65535) {
    throw std::invalid_argument("write_pgm: maxval must be in 1..65535");
  }
  const auto quantize = [maxval](double v) {
    return static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
  };
  out << (encoding == PgmEncoding::kPlain ? "P2" : "P5") << '\n'
      << image.cols() << ' ' << image.rows() << '\n'
      << maxval << '\n';
  if (encoding == PgmEncoding::kPlain) {
    for (std::size_t r = 0; r < image.rows(); ++r) {
      for (std::size_t c = 0; c < image.cols(); ++c) {
        out << quantize(image.at(r, c)) << (c + 1 == image.cols() ? '\n' : ' ');
      }
    }
    return;
  }
  for (double v : image.values()) {
    const unsigned px = quantize(v);
    if (maxval > 255) {
      out.put(static_cast<char>((px >> 8) & 0xff));
    }
    out.put(static_cast<char>(px & 0xff));
  }
}

void write_pgm(const std::filesystem::path& path, const Image& image, PgmEncoding encoding,
               unsigned maxval) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("write_pgm: cannot open " + path.string());
  }
  write_pgm(out, image, encoding, maxval);
}

}  // namespace varsearch
