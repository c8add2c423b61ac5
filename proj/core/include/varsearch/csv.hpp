#pragma once

#include <charconv>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

namespace varsearch {

/// Minimal CSV row writer. Doubles are printed in shortest round-trip form,
/// so output bytes depend only on the values.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((write_field(fields, first), first = false), ...);
    out_ << '\n';
  }

  /// Shortest text that parses back to the same double.
  static std::string format(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  }

 private:
  template <typename T>
  void write_field(const T& value, bool first) {
    if (!first) out_ << ',';
    if constexpr (std::is_floating_point_v<T>) {
      out_ << format(static_cast<double>(value));
    } else if constexpr (std::is_convertible_v<T, std::string_view>) {
      out_ << std::string_view(value);
    } else {
      out_ << value;
    }
  }

  std::ostream& out_;
};

}  // namespace varsearch
