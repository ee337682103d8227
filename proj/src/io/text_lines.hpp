#pragma once

// Whitespace tokenizer for the line-oriented text formats.

#include "camgeo/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace camgeo::io {

struct TextLine {
  std::size_t number = 0;
  std::vector<std::string> tokens;
};

inline std::vector<TextLine> tokenize_lines(std::istream& in) {
  std::vector<TextLine> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    TextLine line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      std::size_t j = i;
      while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
      if (j > i) line.tokens.emplace_back(raw.substr(i, j - i));
      i = j;
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

class LineError {
public:
  LineError(std::string source, std::size_t line) : prefix_(std::move(source) + ":" + std::to_string(line) + ": ") {}
  [[noreturn]] void fail(const std::string& msg) const { throw ValidationError(prefix_ + msg); }
  const std::string& prefix() const { return prefix_; }

private:
  std::string prefix_;
};

inline double parse_double(const std::string& tok, const LineError& err) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v))
    err.fail("expected a finite number, got '" + tok + "'");
  return v;
}

inline long long parse_int(const std::string& tok, const LineError& err) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) err.fail("expected an integer, got '" + tok + "'");
  return v;
}

} // namespace camgeo::io
