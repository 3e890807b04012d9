#include <doctest.h>

#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "mecsim/io.hpp"
#include "support.hpp"

using namespace mecsim;
using mecsim::testing::temp_dir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("packet log round trip") {
  const auto dir = temp_dir("io_packets");
  std::mt19937_64 rng(8);
  auto recs = mecsim::testing::random_log(rng, 300, Direction::UL, {});
  for (auto& r : recs) {
    r.link = {2, TechKind::MMWAVE};
    r.n_transmissions = 1 + static_cast<int>(r.id % 3);
  }
  write_packet_log(recs, dir / "ul.csv");
  CHECK(read_packet_log(dir / "ul.csv") == recs);

  const auto text = slurp(dir / "ul.csv");
  CHECK(text.rfind("id,dir,size_bits,t_sent_s,t_delivered_s,link,ntx,e2e_delay_ms\n", 0) == 0);

  const std::vector<PacketRecord> one{{0, Direction::DL, 33333, Micros{1}, Micros{7501}, {1, TechKind::LTE}, 1}};
  write_packet_log(one, dir / "dl.csv");
  CHECK(slurp(dir / "dl.csv").find("0,DL,33333,0.000001,0.007501,1:lte,1,7.500") != std::string::npos);
}

TEST_CASE("packet log parsing") {
  const auto dir = temp_dir("io_parse");
  write(dir / "min.csv", "id,dir,size_bits,t_sent_s,t_delivered_s\n0,UL,8192,0.1,0.1025\n1,UL,8192,0.2,\n");
  const auto r = read_packet_log(dir / "min.csv");
  REQUIRE(r.size() == 2);
  CHECK(*r[0].delay() == Micros{2500});
  CHECK_FALSE(r[1].delivered());

  write(dir / "empty.csv", "");
  CHECK(read_packet_log(dir / "empty.csv").empty());

  write(dir / "short.csv", "id,dir,size_bits,t_sent_s,t_delivered_s\n0,UL,8192,0.1,0.2\n1,UL,8192\n");
  const auto e1 = error_of([&] { read_packet_log(dir / "short.csv"); });
  CHECK(e1.find("short.csv") != std::string::npos);
  CHECK(e1.find("line 3") != std::string::npos);

  write(dir / "back.csv", "id,dir,size_bits,t_sent_s,t_delivered_s\n0,UL,8192,0.3,0.2\n");
  CHECK(error_of([&] { read_packet_log(dir / "back.csv"); }).find("line 2") != std::string::npos);
  write(dir / "zero.csv", "id,dir,size_bits,t_sent_s,t_delivered_s\n0,UL,0,0.1,0.2\n");
  CHECK_FALSE(error_of([&] { read_packet_log(dir / "zero.csv"); }).empty());
  write(dir / "nohdr.csv", "id,dir,t_sent_s\n0,UL,0.1\n");
  CHECK_FALSE(error_of([&] { read_packet_log(dir / "nohdr.csv"); }).empty());
}

TEST_CASE("rate series round trip") {
  const auto dir = temp_dir("io_rates");
  RateSeries s{FrameGrid::from_hz(30), 31.0, {0.0, 24.576e6, 1.5e6, 120e6}};
  write_rate_series(s, dir / "r.csv");
  const auto back = read_rate_series(dir / "r.csv");
  CHECK(back.grid == s.grid);
  CHECK(back.d_max_ms == 31.0);
  REQUIRE(back.bps.size() == s.bps.size());
  for (std::size_t i = 0; i < s.bps.size(); ++i) CHECK(back.bps[i] == doctest::Approx(s.bps[i]).epsilon(1e-15));

  RateSeries inf{FrameGrid::from_hz(30), INFINITY, {1e6}};
  write_rate_series(inf, dir / "inf.csv");
  CHECK(std::isinf(read_rate_series(dir / "inf.csv").d_max_ms));

  write(dir / "gap.csv", "interval,t_start_s,rate_mbps\n0,0,1\n2,0.066666,1\n");
  CHECK(error_of([&] { read_rate_series(dir / "gap.csv"); }).find("line 3") != std::string::npos);
}

TEST_CASE("heatmap and CDF round trip") {
  const auto dir = temp_dir("io_heatmap");
  const HeatmapMatrix m{{30, 40, 50}, {26, 26, 26, 26}, {{1, 0.5, 0.25, 0}, {1, 0.75, 0.5, 0.125}, {1, 1, 1, 0.5}}};
  write_heatmap(m, dir / "h.csv");
  const auto back = read_heatmap(dir / "h.csv");
  CHECK(back.d_max_ms == m.d_max_ms);
  CHECK(back.camera_rates_mbps == m.camera_rates_mbps);
  CHECK(back.cells == m.cells);
  CHECK(back.required_mbps(2) == 52);

  const std::vector<CdfPoint> cdf{{14.9, 0.25}, {15.2, 0.5}, {38.0, 1.0}};
  write_cdf(cdf, dir / "c.csv");
  CHECK(read_cdf(dir / "c.csv") == cdf);
}

TEST_CASE("heatmap SVG") {
  const auto dir = temp_dir("io_svg");
  const HeatmapMatrix m{{30, 40}, {26, 26, 26, 26}, {{1, 0.5, 0, 0}, {1, 1, 0.5, 0}}};
  write_heatmap_svg(m, dir / "h.svg");
  const auto svg = slurp(dir / "h.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("rgb(8,48,107)") != std::string::npos);
  CHECK(svg.find("rgb(255,255,255)") != std::string::npos);
  for (const char* label : {"26 Mbps", "52 Mbps", "78 Mbps", "104 Mbps", "30 ms", "40 ms"}) {
    CHECK(svg.find(label) != std::string::npos);
  }
}
