#include "mecsim/csv.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

namespace mecsim::csv {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
}

Header::Header(std::string_view line) {
  for (auto f : split(line)) names_.emplace_back(f);
}

std::optional<std::size_t> Header::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t Header::require(std::string_view name, const std::filesystem::path& file) const {
  auto idx = find(name);
  if (!idx) throw ParseError(fmt::format("{}: line 1: missing column '{}'", file.string(), name));
  return *idx;
}

double to_double(std::string_view s, std::size_t line, std::string_view field) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(fmt::format("line {}: bad {} '{}'", line, field, s));
  }
  return v;
}

std::int64_t to_int(std::string_view s, std::size_t line, std::string_view field) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ParseError(fmt::format("line {}: bad {} '{}'", line, field, s));
  }
  return v;
}

Micros to_micros(std::string_view s, std::size_t line, std::string_view field) {
  // Exact decimal parse: integer seconds plus up to six fractional digits.
  std::string_view t = s;
  bool neg = false;
  if (!t.empty() && t.front() == '-') {
    neg = true;
    t.remove_prefix(1);
  }
  auto dot = t.find('.');
  std::string_view whole = t.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : t.substr(dot + 1);
  if (whole.empty() && frac.empty()) throw ParseError(fmt::format("line {}: bad {} '{}'", line, field, s));
  if (frac.size() > 6) {
    // More precision than the clock: fall back to rounding.
    return from_seconds(to_double(s, line, field));
  }
  std::int64_t w = whole.empty() ? 0 : to_int(whole, line, field);
  std::int64_t f = 0;
  if (!frac.empty()) {
    f = to_int(frac, line, field);
    if (f < 0) throw ParseError(fmt::format("line {}: bad {} '{}'", line, field, s));
    for (std::size_t i = frac.size(); i < 6; ++i) f *= 10;
  }
  if (w < 0) throw ParseError(fmt::format("line {}: bad {} '{}'", line, field, s));
  std::int64_t us = w * 1'000'000 + f;
  return Micros{neg ? -us : us};
}

std::string format_seconds(Micros t) {
  auto us = t.count();
  const char* sign = us < 0 ? "-" : "";
  if (us < 0) us = -us;
  return fmt::format("{}{}.{:06d}", sign, us / 1'000'000, us % 1'000'000);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", path.string()));
  return in;
}

std::vector<Line> read_lines(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<Line> out;
  std::string text;
  std::size_t n = 0;
  while (std::getline(in, text)) {
    ++n;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty() || text.front() == '#') continue;
    out.push_back({n, std::move(text)});
  }
  return out;
}

}  // namespace mecsim::csv
