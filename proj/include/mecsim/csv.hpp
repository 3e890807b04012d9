#pragma once

// Minimal CSV plumbing shared by the trace, packet-log, and report writers.
// Fields never contain commas or quotes in any schema used here.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mecsim/model.hpp"

namespace mecsim::csv {

std::vector<std::string_view> split(std::string_view line, char sep = ',');

/// Column lookup by header name.
class Header {
 public:
  explicit Header(std::string_view line);
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t require(std::string_view name, const std::filesystem::path& file) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
};

double to_double(std::string_view s, std::size_t line, std::string_view field);
std::int64_t to_int(std::string_view s, std::size_t line, std::string_view field);
/// Seconds with up to microsecond precision, parsed without float drift.
Micros to_micros(std::string_view seconds, std::size_t line, std::string_view field);
std::string format_seconds(Micros t);

std::ofstream open_out(const std::filesystem::path& path);
std::ifstream open_in(const std::filesystem::path& path);

/// Reads non-empty lines, skipping leading '#' comment lines; returns
/// (1-based line number, text) pairs.
struct Line {
  std::size_t number;
  std::string text;
};
std::vector<Line> read_lines(const std::filesystem::path& path);

}  // namespace mecsim::csv
