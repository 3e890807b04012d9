#include "mecsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "mecsim/csv.hpp"

namespace mecsim {

namespace {

struct Table {
  std::map<std::string, std::string, std::less<>> meta;
  std::vector<csv::Line> lines;
};

Table read_table(const std::filesystem::path& path) {
  auto in = csv::open_in(path);
  Table t;
  std::string text;
  std::size_t n = 0;
  while (std::getline(in, text)) {
    ++n;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    if (text.front() == '#') {
      std::string_view m(text);
      m.remove_prefix(1);
      while (!m.empty() && m.front() == ' ') m.remove_prefix(1);
      const auto eq = m.find('=');
      if (eq != std::string_view::npos) t.meta.emplace(std::string(m.substr(0, eq)), std::string(m.substr(eq + 1)));
      continue;
    }
    t.lines.push_back({n, std::move(text)});
  }
  return t;
}

// Prefixes parse errors with the file name.
template <typename F>
auto with_path(const std::filesystem::path& path, F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path.string(), 0) == 0) throw;
    throw ParseError(fmt::format("{}: {}", path.string(), msg));
  }
}

std::vector<std::string_view> fields(const csv::Line& ln, std::size_t expected) {
  auto f = csv::split(ln.text);
  if (f.size() != expected) {
    throw ParseError(fmt::format("line {}: expected {} fields, got {}", ln.number, expected, f.size()));
  }
  return f;
}

LinkId parse_link(std::string_view s, std::size_t line) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) throw ParseError(fmt::format("line {}: bad link '{}'", line, s));
  LinkId id;
  id.bs_id = static_cast<int>(csv::to_int(s.substr(0, colon), line, "link"));
  try {
    id.tech = parse_tech(s.substr(colon + 1));
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("line {}: {}", line, e.what()));
  }
  return id;
}

}  // namespace

void write_packet_log(std::span<const PacketRecord> records, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << "id,dir,size_bits,t_sent_s,t_delivered_s,link,ntx,e2e_delay_ms\n";
  for (const auto& r : records) {
    out << r.id << ',' << to_string(r.dir) << ',' << r.size_bits << ',' << csv::format_seconds(r.t_sent) << ',';
    if (r.t_delivered) out << csv::format_seconds(*r.t_delivered);
    out << ',' << r.link.bs_id << ':' << to_string(r.link.tech) << ',' << r.n_transmissions << ',';
    if (r.t_delivered) out << fmt::format("{:.3f}", to_ms(*r.delay()));
    out << '\n';
  }
  if (!out) throw std::runtime_error(fmt::format("write failed: '{}'", path.string()));
}

std::vector<PacketRecord> read_packet_log(const std::filesystem::path& path) {
  return with_path(path, [&] {
    const auto t = read_table(path);
    std::vector<PacketRecord> out;
    if (t.lines.empty()) return out;
    const csv::Header h(t.lines.front().text);
    const auto c_id = h.require("id", path);
    const auto c_dir = h.require("dir", path);
    const auto c_size = h.require("size_bits", path);
    const auto c_sent = h.require("t_sent_s", path);
    const auto c_deliv = h.require("t_delivered_s", path);
    const auto c_link = h.find("link");
    const auto c_ntx = h.find("ntx");
    for (std::size_t i = 1; i < t.lines.size(); ++i) {
      const auto& ln = t.lines[i];
      const auto f = fields(ln, h.size());
      PacketRecord r;
      r.id = csv::to_int(f[c_id], ln.number, "id");
      try {
        r.dir = parse_direction(f[c_dir]);
      } catch (const ParseError& e) {
        throw ParseError(fmt::format("line {}: {}", ln.number, e.what()));
      }
      r.size_bits = csv::to_int(f[c_size], ln.number, "size_bits");
      if (r.size_bits <= 0) throw ParseError(fmt::format("line {}: size_bits must be positive", ln.number));
      r.t_sent = csv::to_micros(f[c_sent], ln.number, "t_sent_s");
      if (!f[c_deliv].empty()) {
        r.t_delivered = csv::to_micros(f[c_deliv], ln.number, "t_delivered_s");
        if (*r.t_delivered < r.t_sent) {
          throw ParseError(fmt::format("line {}: delivered before it was sent", ln.number));
        }
      }
      if (c_link && !f[*c_link].empty()) r.link = parse_link(f[*c_link], ln.number);
      if (c_ntx) r.n_transmissions = static_cast<int>(csv::to_int(f[*c_ntx], ln.number, "ntx"));
      out.push_back(r);
    }
    return out;
  });
}

void write_rate_series(const RateSeries& s, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << "# d_max_ms=" << fmt::format("{}", s.d_max_ms) << '\n';
  out << "# frame_period_us=" << s.grid.num_us() << '/' << s.grid.den() << '\n';
  out << "interval,t_start_s,rate_mbps\n";
  for (std::size_t k = 0; k < s.bps.size(); ++k) {
    out << k << ',' << csv::format_seconds(s.grid.start(static_cast<std::int64_t>(k))) << ','
        << fmt::format("{}", s.bps[k] / kBitsPerMbit) << '\n';
  }
  if (!out) throw std::runtime_error(fmt::format("write failed: '{}'", path.string()));
}

RateSeries read_rate_series(const std::filesystem::path& path) {
  return with_path(path, [&] {
    const auto t = read_table(path);
    RateSeries s;
    if (auto it = t.meta.find("d_max_ms"); it != t.meta.end()) {
      s.d_max_ms = it->second == "inf" ? INFINITY : csv::to_double(it->second, 0, "d_max_ms");
    }
    if (auto it = t.meta.find("frame_period_us"); it != t.meta.end()) {
      const auto nd = csv::split(it->second, '/');
      if (nd.size() != 2) throw ParseError("bad frame_period_us");
      s.grid = FrameGrid(csv::to_int(nd[0], 0, "frame_period_us"), csv::to_int(nd[1], 0, "frame_period_us"));
    }
    if (t.lines.empty()) throw ParseError("line 1: missing header");
    const csv::Header h(t.lines.front().text);
    const auto c_k = h.require("interval", path);
    const auto c_rate = h.require("rate_mbps", path);
    for (std::size_t i = 1; i < t.lines.size(); ++i) {
      const auto& ln = t.lines[i];
      const auto f = fields(ln, h.size());
      const auto k = csv::to_int(f[c_k], ln.number, "interval");
      if (k != static_cast<std::int64_t>(s.bps.size())) {
        throw ParseError(fmt::format("line {}: intervals must be consecutive from 0", ln.number));
      }
      const double mbps = csv::to_double(f[c_rate], ln.number, "rate_mbps");
      if (mbps < 0) throw ParseError(fmt::format("line {}: negative rate", ln.number));
      s.bps.push_back(mbps * kBitsPerMbit);
    }
    return s;
  });
}

void write_heatmap(const HeatmapMatrix& m, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << "# camera_rates_mbps=";
  for (std::size_t i = 0; i < m.camera_rates_mbps.size(); ++i) {
    out << (i ? ";" : "") << fmt::format("{}", m.camera_rates_mbps[i]);
  }
  out << "\nd_max_ms,n_cameras,availability\n";
  for (std::size_t r = 0; r < m.d_max_ms.size(); ++r) {
    for (std::size_t n = 0; n < m.cells[r].size(); ++n) {
      out << fmt::format("{},{},{}\n", m.d_max_ms[r], n + 1, m.cells[r][n]);
    }
  }
  if (!out) throw std::runtime_error(fmt::format("write failed: '{}'", path.string()));
}

HeatmapMatrix read_heatmap(const std::filesystem::path& path) {
  return with_path(path, [&] {
    const auto t = read_table(path);
    HeatmapMatrix m;
    if (auto it = t.meta.find("camera_rates_mbps"); it != t.meta.end()) {
      for (auto v : csv::split(it->second, ';')) m.camera_rates_mbps.push_back(csv::to_double(v, 0, "camera rate"));
    }
    if (t.lines.empty()) throw ParseError("line 1: missing header");
    const csv::Header h(t.lines.front().text);
    const auto c_d = h.require("d_max_ms", path);
    const auto c_n = h.require("n_cameras", path);
    const auto c_a = h.require("availability", path);
    for (std::size_t i = 1; i < t.lines.size(); ++i) {
      const auto& ln = t.lines[i];
      const auto f = fields(ln, h.size());
      const double d = csv::to_double(f[c_d], ln.number, "d_max_ms");
      const auto n = csv::to_int(f[c_n], ln.number, "n_cameras");
      const double a = csv::to_double(f[c_a], ln.number, "availability");
      if (m.d_max_ms.empty() || m.d_max_ms.back() != d) {
        m.d_max_ms.push_back(d);
        m.cells.emplace_back();
      }
      if (n != static_cast<std::int64_t>(m.cells.back().size()) + 1) {
        throw ParseError(fmt::format("line {}: n_cameras must count up from 1 per d_max", ln.number));
      }
      m.cells.back().push_back(a);
    }
    return m;
  });
}

void write_cdf(std::span<const CdfPoint> cdf, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << "value,fraction\n";
  for (const auto& p : cdf) out << fmt::format("{},{}\n", p.value, p.fraction);
  if (!out) throw std::runtime_error(fmt::format("write failed: '{}'", path.string()));
}

std::vector<CdfPoint> read_cdf(const std::filesystem::path& path) {
  return with_path(path, [&] {
    const auto t = read_table(path);
    std::vector<CdfPoint> out;
    if (t.lines.empty()) return out;
    const csv::Header h(t.lines.front().text);
    const auto c_v = h.require("value", path);
    const auto c_f = h.require("fraction", path);
    for (std::size_t i = 1; i < t.lines.size(); ++i) {
      const auto f = fields(t.lines[i], h.size());
      out.push_back({csv::to_double(f[c_v], t.lines[i].number, "value"),
                     csv::to_double(f[c_f], t.lines[i].number, "fraction")});
    }
    return out;
  });
}

void write_heatmap_svg(const HeatmapMatrix& m, const std::filesystem::path& path) {
  constexpr int cell = 60;
  constexpr int left = 90;
  constexpr int top = 30;
  const int cols = static_cast<int>(m.camera_rates_mbps.size());
  const int rows = static_cast<int>(m.d_max_ms.size());
  const int width = left + cols * cell + 20;
  const int height = top + rows * cell + 50;

  auto out = csv::open_out(path);
  out << fmt::format(R"svg(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)svg",
                     width, height)
      << '\n';
  for (int r = 0; r < rows; ++r) {
    const int y = top + r * cell;
    out << fmt::format(R"svg(<text x="{}" y="{}" text-anchor="end">{} ms</text>)svg", left - 8, y + cell / 2 + 4,
                       m.d_max_ms[static_cast<std::size_t>(r)])
        << '\n';
    for (int c = 0; c < cols; ++c) {
      const double a = std::clamp(m.cells[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)], 0.0, 1.0);
      // Linear blend from white to rgb(8,48,107).
      const auto mix = [a](int dark) { return static_cast<int>(std::lround(255 + (dark - 255) * a)); };
      const int x = left + c * cell;
      out << fmt::format(R"svg(<rect x="{}" y="{}" width="{}" height="{}" fill="rgb({},{},{})" stroke="#888"/>)svg", x, y,
                         cell, cell, mix(8), mix(48), mix(107))
          << '\n';
      out << fmt::format(R"svg(<text x="{}" y="{}" text-anchor="middle" fill="{}">{:.0f}%</text>)svg", x + cell / 2,
                         y + cell / 2 + 4, a > 0.5 ? "white" : "black", 100 * a)
          << '\n';
    }
  }
  for (int c = 0; c < cols; ++c) {
    out << fmt::format(R"svg(<text x="{}" y="{}" text-anchor="middle">{} Mbps</text>)svg", left + c * cell + cell / 2,
                       top + rows * cell + 18, m.required_mbps(static_cast<std::size_t>(c) + 1))
        << '\n';
  }
  out << "</svg>\n";
}

}  // namespace mecsim
