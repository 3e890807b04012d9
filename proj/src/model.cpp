#include "mecsim/model.hpp"

#include <cmath>
#include <fmt/format.h>

namespace mecsim {

Micros from_ms(double ms) { return Micros{std::llround(ms * 1e3)}; }
Micros from_seconds(double s) { return Micros{std::llround(s * 1e6)}; }

std::string_view to_string(Resolution r) { return resolution_info(r).name; }

Resolution parse_resolution(std::string_view s) {
  for (auto r : kAllResolutions) {
    if (resolution_info(r).name == s) return r;
  }
  if (s == "2p2K" || s == "2.2k" || s == "R2p2K") return Resolution::R2p2K;
  if (s == "720p" || s == "R720P") return Resolution::R720P;
  if (s == "1080p" || s == "R1080P") return Resolution::R1080P;
  if (s == "wvga") return Resolution::WVGA;
  throw ParseError(fmt::format("unknown resolution '{}'", s));
}

std::string_view to_string(TechKind t) { return t == TechKind::LTE ? "lte" : "mmwave"; }

TechKind parse_tech(std::string_view s) {
  if (s == "lte" || s == "LTE") return TechKind::LTE;
  if (s == "mmwave" || s == "MMWAVE" || s == "mmw") return TechKind::MMWAVE;
  throw ParseError(fmt::format("unknown technology '{}'", s));
}

std::string_view to_string(Direction d) { return d == Direction::UL ? "UL" : "DL"; }

Direction parse_direction(std::string_view s) {
  if (s == "UL" || s == "ul") return Direction::UL;
  if (s == "DL" || s == "dl") return Direction::DL;
  throw ParseError(fmt::format("unknown direction '{}'", s));
}

std::string_view to_string(CameraStrategy s) {
  return s == CameraStrategy::UNIFORM ? "uniform" : "priority";
}

CameraStrategy parse_strategy(std::string_view s) {
  if (s == "uniform" || s == "UNIFORM") return CameraStrategy::UNIFORM;
  if (s == "priority" || s == "PRIORITY") return CameraStrategy::PRIORITY;
  throw ParseError(fmt::format("unknown camera strategy '{}'", s));
}

Technology Technology::lte() {
  return Technology{TechKind::LTE, 1.9, 40.0, 0.25, Duplex::FDD, Micros{1000}, 8};
}

Technology Technology::mmwave() {
  // Numerology 2: 60 kHz subcarriers, 0.25 ms slots.
  return Technology{TechKind::MMWAVE, 28.0, 400.0, 0.25, Duplex::TDD, Micros{250}, 20};
}

double TechConfig::array_gain_db() const {
  return 10.0 * std::log10(static_cast<double>(ue_array_elements) * bs_array_elements);
}

TechConfig TechConfig::lte_defaults() {
  TechConfig c;
  c.tech = Technology::lte();
  c.ue_array_elements = 1;
  c.bs_array_elements = 1;
  c.path_loss = {2.0, 2.6, 5.0};
  c.se_cap_bps_hz = 3.6;
  c.ul_share = 1.0;
  c.harq_rtx_delay = Micros{8000};
  c.max_rtx = 4;
  c.ul_processing = Micros{11000};
  c.dl_processing = Micros{5000};
  return c;
}

TechConfig TechConfig::mmwave_defaults() {
  TechConfig c;
  c.tech = Technology::mmwave();
  c.ue_array_elements = 16;  // 4 x 4
  c.bs_array_elements = 64;  // 8 x 8
  c.path_loss = {2.0, 3.5, 20.0};
  c.se_cap_bps_hz = 7.4;
  c.ul_share = 0.6;
  c.harq_rtx_delay = Micros{1000};
  c.max_rtx = 4;
  c.ul_processing = Micros{2250};
  c.dl_processing = Micros{2250};
  return c;
}

std::int64_t TransportParams::dl_pkt_bits() const {
  return std::llround(dl_rate_bps / dl_pkts_per_s);
}

// ---------------------------------------------------------------------------

FrameGrid::FrameGrid(std::int64_t num_us, std::int64_t den) : num_us_(num_us), den_(den) {
  if (num_us <= 0 || den <= 0) throw std::invalid_argument("frame period must be positive");
}

FrameGrid FrameGrid::from_hz(double frame_hz) {
  if (!(frame_hz > 0.0) || !std::isfinite(frame_hz)) {
    throw std::invalid_argument("frame rate must be positive");
  }
  // Millihertz resolution keeps the period rational and the grid exact.
  return FrameGrid(1'000'000'000, std::llround(frame_hz * 1000.0));
}

Micros FrameGrid::start(std::int64_t k) const {
  // k * num fits comfortably in 64 bits for any realistic horizon (k < 1e8).
  return Micros{k * num_us_ / den_};
}

std::int64_t FrameGrid::index_of(Micros t) const {
  // Largest k with floor(k num / den) <= t, i.e. k num < (t + 1) den.
  const std::int64_t tt = t.count();
  if (tt < 0) return -1 - ((-tt - 1) * den_) / num_us_;
  return ((tt + 1) * den_ - 1) / num_us_;
}

std::int64_t FrameGrid::count(Micros horizon) const {
  if (horizon.count() <= 0) return 0;
  return index_of(horizon - Micros{1}) + 1;
}

FrameInterval frame_interval(const FrameGrid& grid, std::int64_t k) {
  return {k, grid.start(k), grid.start(k + 1) - grid.start(k)};
}

// ---------------------------------------------------------------------------

ScenarioConfig ScenarioConfig::defaults() {
  ScenarioConfig cfg;
  cfg.route.waypoints = {{0.0, 0.0}, {120.0, 0.0}};
  BaseStationSpec bs1;
  bs1.id = 1;
  bs1.position = {20.0, 25.0};
  bs1.nlos = {{55.0, 90.0}};
  BaseStationSpec bs2;
  bs2.id = 2;
  bs2.position = {110.0, -30.0};
  bs2.nlos = {{40.0, 85.0}};
  cfg.base_stations = {bs1, bs2};
  return cfg;
}

namespace {

void check_tech(const TechConfig& t, std::string_view name, std::vector<std::string>& out) {
  auto bad = [&](std::string_view field, std::string_view what) {
    out.push_back(fmt::format("{}.{} {}", name, field, what));
  };
  if (!(t.tech.carrier_ghz > 0)) bad("carrier_ghz", "must be positive");
  if (!(t.tech.total_bandwidth_mhz > 0)) bad("bandwidth_mhz", "must be positive");
  if (!(t.tech.loading_fraction > 0 && t.tech.loading_fraction <= 1)) {
    bad("loading_fraction", "must be in (0, 1]");
  }
  if (t.tech.slot.count() <= 0) bad("slot_ms", "must be positive");
  if (t.tech.n_harq < 1) bad("n_harq", "must be at least 1");
  if (!(t.se_cap_bps_hz > 0)) bad("se_cap_bps_hz", "must be positive");
  if (!(t.ul_share > 0 && t.ul_share <= 1)) bad("ul_share", "must be in (0, 1]");
  if (t.tech.duplex == Duplex::TDD && t.ul_share >= 1) bad("ul_share", "must be < 1 for TDD");
  if (t.max_rtx < 1) bad("max_rtx", "must be at least 1");
  if (t.max_rtx > t.tech.n_harq) bad("max_rtx", "exceeds n_harq");
  if (t.harq_rtx_delay.count() < 0) bad("harq_rtx_delay_ms", "negative");
  if (t.ul_processing.count() < 0) bad("ul_processing_ms", "negative");
  if (t.dl_processing.count() < 0) bad("dl_processing_ms", "negative");
  if (t.ue_array_elements < 1) bad("ue_array", "must be at least 1");
  if (t.bs_array_elements < 1) bad("bs_array", "must be at least 1");
  if (t.interference_factor < 0) bad("interference_factor", "negative");
  if (t.path_loss.n_los < 2.0) bad("n_los", "below free-space exponent 2");
  if (t.path_loss.n_nlos < t.path_loss.n_los) bad("n_nlos", "below n_los");
  if (t.path_loss.nlos_offset_db < 0) bad("nlos_offset_db", "negative");
  if (t.rays.n_scatter < 0) bad("n_scatter", "negative");
  if (t.rays.scatter_extra_loss_db < 0) bad("scatter_extra_loss_db", "negative");
  if (t.rays.scatter_spread_db < 0) bad("scatter_spread_db", "negative");
  if (!(t.bler.slope >= 0)) bad("bler_slope", "negative");
}

}  // namespace

std::vector<std::string> validate_config(const ScenarioConfig& cfg) {
  std::vector<std::string> out;
  const auto& r = cfg.route;
  if (r.waypoints.size() < 2) out.emplace_back("route.waypoints fewer than 2");
  if (!(r.spacing_m > 0)) out.emplace_back("route.spacing_m must be positive");
  if (!(r.speed_mps > 0)) out.emplace_back("route.speed_mps must be positive");
  if (cfg.base_stations.empty()) out.emplace_back("base_stations empty");
  for (std::size_t i = 0; i < cfg.base_stations.size(); ++i) {
    const auto& bs = cfg.base_stations[i];
    for (std::size_t j = 0; j < i; ++j) {
      if (cfg.base_stations[j].id == bs.id) out.push_back(fmt::format("bs.{} duplicate id", bs.id));
    }
    if (!bs.lte && !bs.mmwave) out.push_back(fmt::format("bs.{} carries no technology", bs.id));
    if (bs.height_m < 0) out.push_back(fmt::format("bs.{}.height_m negative", bs.id));
    for (const auto& iv : bs.nlos) {
      if (iv.end_m < iv.begin_m) out.push_back(fmt::format("bs.{}.nlos interval reversed", bs.id));
    }
  }
  check_tech(cfg.lte, "lte", out);
  check_tech(cfg.mmwave, "mmwave", out);

  const auto& b = cfg.blockage;
  if (b.k_nsb < 0) out.emplace_back("blockage.k_nsb negative");
  if (b.t_blk.count() <= 0) out.emplace_back("blockage.t_blk_ms must be positive");
  if (b.self_attenuation_db < 0) out.emplace_back("blockage.self_attenuation_db negative");
  if (b.nsb_attenuation_db < 0) out.emplace_back("blockage.nsb_attenuation_db negative");
  if (!(b.self_az_spread_deg > 0) || !(b.self_el_spread_deg > 0)) {
    out.emplace_back("blockage.self spreads must be positive");
  }
  if (!(b.nsb_az_spread_min_deg > 0) || b.nsb_az_spread_max_deg < b.nsb_az_spread_min_deg) {
    out.emplace_back("blockage.nsb_az_spread bounds invalid");
  }
  if (!(b.nsb_el_spread_min_deg > 0) || b.nsb_el_spread_max_deg < b.nsb_el_spread_min_deg) {
    out.emplace_back("blockage.nsb_el_spread bounds invalid");
  }

  const auto& t = cfg.traffic;
  if (t.d_core.count() < 0) out.emplace_back("d_core_ms negative");
  if (!(t.ul_cap_bps > 0)) out.emplace_back("ul_cap_mbps must be positive");
  if (!(t.dl_rate_bps > 0)) out.emplace_back("dl_rate_mbps must be positive");
  if (!(t.dl_pkts_per_s > 0)) out.emplace_back("dl_pkts_per_s must be positive");
  if (t.ul_pkt_bits <= 0) out.emplace_back("tcp_pkt_bytes must be positive");
  if (!(t.cc.backoff > 0 && t.cc.backoff < 1)) out.emplace_back("traffic.backoff must be in (0, 1)");
  if (!(t.cc.probe_step_bps > 0)) out.emplace_back("traffic.probe_step_mbps must be positive");
  if (!(t.cc.min_rate_bps > 0) || t.cc.min_rate_bps > t.ul_cap_bps) {
    out.emplace_back("traffic.min_rate_mbps must be in (0, ul_cap]");
  }
  if (t.cc.ack_extra.count() < 0) out.emplace_back("traffic.ack_extra_ms negative");

  if (!(cfg.frame_hz > 0) || !std::isfinite(cfg.frame_hz)) {
    out.emplace_back("frame_hz must be positive");
  }
  if (cfg.ue_height_m < 0) out.emplace_back("route.ue_height_m negative");
  if (cfg.policy.dmax_grid_ms.empty()) out.emplace_back("policy.dmax_grid empty");
  for (double d : cfg.policy.dmax_grid_ms) {
    if (d < 0) out.emplace_back("policy.dmax_grid negative entry");
  }
  for (double d : cfg.policy.total_targets_ms) {
    if (!(d > 0)) out.emplace_back("policy.targets non-positive entry");
  }
  if (cfg.policy.edge_rtt_ms < 0) out.emplace_back("policy.edge_rtt_ms negative");
  return out;
}

}  // namespace mecsim
