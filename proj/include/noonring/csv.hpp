#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace noonring {

/// Minimal CSV emitter: header row first, '.' decimals, shortest
/// round-trip representation for doubles so output is byte-stable.
class CsvWriter {
 public:
  using Cell = std::variant<double, std::int64_t, std::string>;

  CsvWriter(std::ostream& os, std::vector<std::string> header) : os_(os), columns_(header.size()) {
    write_line(header);
  }

  void row(const std::vector<Cell>& cells) {
    if (cells.size() != columns_) throw std::invalid_argument("CSV row width does not match header");
    std::vector<std::string> text;
    text.reserve(cells.size());
    for (const auto& c : cells) text.push_back(format(c));
    write_line(text);
  }

  static std::string format(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, *d);
      if (ec != std::errc()) throw std::runtime_error("number formatting failed");
      return {buf, end};
    }
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
  }

 private:
  void write_line(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) os_ << ',';
      os_ << fields[i];
    }
    os_ << '\n';
  }

  std::ostream& os_;
  std::size_t columns_;
};

}  // namespace noonring
