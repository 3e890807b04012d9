#include "mecsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>
#include <set>

#include "mecsim/csv.hpp"

namespace mecsim {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

double wrap_deg(double a) {
  a = std::fmod(a, 360.0);
  if (a < 0) a += 360.0;
  return a;
}

// Smallest absolute difference between two azimuths.
double az_distance(double a, double b) {
  double d = std::fabs(wrap_deg(a) - wrap_deg(b));
  return d > 180.0 ? 360.0 - d : d;
}

double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

enum StreamKey : std::uint64_t { kRayStream = 1, kBlockageStream = 2 };

}  // namespace

// ---------------------------------------------------------------------------
// Route

double route_length_m(const RouteSpec& spec) {
  double len = 0.0;
  for (std::size_t i = 1; i < spec.waypoints.size(); ++i) {
    len += std::hypot(spec.waypoints[i].x - spec.waypoints[i - 1].x,
                      spec.waypoints[i].y - spec.waypoints[i - 1].y);
  }
  return len;
}

std::vector<RoutePoint> build_route(const RouteSpec& spec) {
  if (spec.waypoints.size() < 2) throw InvalidRoute("route needs at least 2 waypoints");
  if (!(spec.spacing_m > 0)) throw InvalidRoute("route spacing must be positive");
  if (!(spec.speed_mps > 0)) throw InvalidRoute("route speed must be positive");

  const double total = route_length_m(spec);
  // Tolerate floating error so that e.g. 10 m / 1 m gives 11 points.
  const auto n = static_cast<std::int64_t>(std::floor(total / spec.spacing_m + 1e-9)) + 1;

  std::vector<RoutePoint> out;
  out.reserve(static_cast<std::size_t>(n));
  std::size_t seg = 1;
  double seg_start = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) * spec.spacing_m;
    auto seg_len = [&](std::size_t k) {
      return std::hypot(spec.waypoints[k].x - spec.waypoints[k - 1].x,
                        spec.waypoints[k].y - spec.waypoints[k - 1].y);
    };
    while (seg + 1 < spec.waypoints.size() && s > seg_start + seg_len(seg)) {
      seg_start += seg_len(seg);
      ++seg;
    }
    const auto& a = spec.waypoints[seg - 1];
    const auto& b = spec.waypoints[seg];
    const double len = seg_len(seg);
    const double f = len > 0 ? std::clamp((s - seg_start) / len, 0.0, 1.0) : 0.0;
    RoutePoint p;
    p.position = {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
    p.arc_m = s;
    p.heading_deg = wrap_deg(std::atan2(b.y - a.y, b.x - a.x) * kDeg);
    p.t = from_seconds(s / spec.speed_mps);
    out.push_back(p);
  }
  return out;
}

std::string route_hash(const RouteSpec& spec) {
  // FNV-1a over the textual route description.
  std::string text = fmt::format("{};{}", spec.spacing_m, spec.speed_mps);
  for (const auto& w : spec.waypoints) text += fmt::format(";{},{}", w.x, w.y);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

// ---------------------------------------------------------------------------
// Propagation

double path_loss_db(double distance_m, double carrier_ghz, bool los, const PathLossParams& params) {
  const double d = std::max(distance_m, 1.0);
  const double pl0 = 32.4 + 20.0 * std::log10(carrier_ghz);
  if (los) return pl0 + 10.0 * params.n_los * std::log10(d);
  return pl0 + 10.0 * params.n_nlos * std::log10(d) + params.nlos_offset_db;
}

double free_space_gain_db(double distance_m, double carrier_ghz) {
  return -path_loss_db(distance_m, carrier_ghz, true, PathLossParams{2.0, 2.0, 0.0});
}

bool is_los(const BaseStationSpec& bs, double arc_m) {
  return std::none_of(bs.nlos.begin(), bs.nlos.end(),
                      [&](const ArcInterval& iv) { return iv.contains(arc_m); });
}

RaySet generate_rays(const RoutePoint& point, const BaseStationSpec& bs, double ue_height_m,
                     const TechConfig& tech, bool los, Rng& rng) {
  const double dx = bs.position.x - point.position.x;
  const double dy = bs.position.y - point.position.y;
  const double d2 = std::hypot(dx, dy);
  const double dh = bs.height_m - ue_height_m;
  const double d3 = std::hypot(d2, dh);
  const double fc = tech.tech.carrier_ghz;

  RaySet set;
  set.bs_id = bs.id;
  set.distance_m = d3;
  set.ue_heading_deg = point.heading_deg;

  const double los_az = wrap_deg(std::atan2(dy, dx) * kDeg);
  const double los_el = std::atan2(dh, d2) * kDeg;

  std::uniform_real_distribution<double> az_dist(0.0, 360.0);
  std::uniform_real_distribution<double> el_dist(-10.0, 30.0);
  std::uniform_real_distribution<double> spread(0.0, tech.rays.scatter_spread_db);
  std::uniform_real_distribution<double> delay(10e-9, 300e-9);

  auto scatter_ray = [&](double gain_db) {
    Ray r;
    r.path_gain_db = gain_db;
    r.aoa_az_deg = az_dist(rng);
    r.aoa_el_deg = el_dist(rng);
    r.aod_az_deg = az_dist(rng);
    r.aod_el_deg = -el_dist(rng);
    r.excess_delay_s = delay(rng);
    r.los = false;
    return r;
  };

  if (los) {
    const double los_gain = -path_loss_db(d3, fc, true, tech.path_loss);
    Ray direct;
    direct.path_gain_db = los_gain;
    direct.aoa_az_deg = los_az;
    direct.aoa_el_deg = los_el;
    direct.aod_az_deg = wrap_deg(los_az + 180.0);
    direct.aod_el_deg = -los_el;
    direct.excess_delay_s = 0.0;
    direct.los = true;
    set.rays.push_back(direct);
    for (int i = 0; i < tech.rays.n_scatter; ++i) {
      const double extra = tech.rays.scatter_extra_loss_db + (i == 0 ? 0.0 : spread(rng));
      set.rays.push_back(scatter_ray(los_gain - extra));
    }
    return set;
  }

  // NLOS: relative ray powers normalized so the total equals the NLOS path gain.
  const int n = std::max(1, tech.rays.n_scatter);
  std::vector<double> rel(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    rel[static_cast<std::size_t>(i)] = i == 0 ? 0.0 : -spread(rng);
    sum += db_to_lin(rel[static_cast<std::size_t>(i)]);
  }
  const double total_gain = -path_loss_db(d3, fc, false, tech.path_loss);
  for (int i = 0; i < n; ++i) {
    set.rays.push_back(scatter_ray(total_gain + rel[static_cast<std::size_t>(i)] - lin_to_db(sum)));
  }
  return set;
}

// ---------------------------------------------------------------------------
// Blockage

bool BlockageRegion::contains(double az_deg, double el_deg, double heading_deg) const {
  const double center = self ? heading_deg + az_center_deg : az_center_deg;
  return az_distance(az_deg, center) <= az_spread_deg / 2.0 &&
         std::fabs(el_deg - el_center_deg) <= el_spread_deg / 2.0;
}

BlockageState sample_blockage(Rng& rng, const BlockageParams& params) {
  BlockageState state;
  if (!params.enabled) return state;
  if (params.self_blocking) {
    state.regions.push_back({180.0, params.self_az_spread_deg, params.self_el_center_deg,
                             params.self_el_spread_deg, true});
  }
  std::uniform_real_distribution<double> center(0.0, 360.0);
  std::uniform_real_distribution<double> az_spread(params.nsb_az_spread_min_deg,
                                                   params.nsb_az_spread_max_deg);
  std::uniform_real_distribution<double> el_spread(params.nsb_el_spread_min_deg,
                                                   params.nsb_el_spread_max_deg);
  for (int k = 0; k < params.k_nsb; ++k) {
    BlockageRegion r;
    r.az_center_deg = center(rng);
    r.az_spread_deg = az_spread(rng);
    r.el_center_deg = params.nsb_el_center_deg;
    r.el_spread_deg = el_spread(rng);
    r.self = false;
    state.regions.push_back(r);
  }
  return state;
}

RaySet apply_blockage(const RaySet& rays, const BlockageState& state, const BlockageParams& params) {
  RaySet out = rays;
  for (auto& ray : out.rays) {
    double att = 0.0;
    for (const auto& region : state.regions) {
      if (region.contains(ray.aoa_az_deg, ray.aoa_el_deg, rays.ue_heading_deg)) {
        att = std::max(att, region.self ? params.self_attenuation_db : params.nsb_attenuation_db);
      }
    }
    ray.path_gain_db -= att;
  }
  return out;
}

// ---------------------------------------------------------------------------
// SINR

double noise_power_dbm(double bandwidth_hz, double noise_figure_db) {
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

double received_power_dbm(const RaySet& rays, double tx_power_dbm, double array_gain_db) {
  if (rays.rays.empty()) return -std::numeric_limits<double>::infinity();
  double lin = 0.0;
  for (const auto& r : rays.rays) lin += db_to_lin(r.path_gain_db);
  return tx_power_dbm + array_gain_db + lin_to_db(lin);
}

std::optional<double> compute_sinr(const RaySet& serving, std::span<const RaySet> interferers,
                                   const LinkBudget& budget) {
  if (serving.rays.empty()) return std::nullopt;
  const double s = received_power_dbm(serving, budget.tx_power_dbm, budget.array_gain_db);
  double n_plus_i = db_to_lin(noise_power_dbm(budget.bandwidth_hz, budget.noise_figure_db));
  for (const auto& other : interferers) {
    if (other.rays.empty()) continue;
    n_plus_i += budget.interference_factor *
                db_to_lin(received_power_dbm(other, budget.tx_power_dbm, budget.array_gain_db));
  }
  const double sinr = s - lin_to_db(n_plus_i);
  if (!(sinr >= kOutageSinrDb)) return std::nullopt;
  return sinr;
}

LinkBudget uplink_budget(const TechConfig& tech) {
  return {tech.ue_tx_power_dbm, tech.ul_noise_figure_db, tech.array_gain_db(),
          tech.tech.bandwidth_to_ue_hz(), tech.interference_factor};
}

// ---------------------------------------------------------------------------
// Trace synthesis

namespace {

ChannelTrace synthesize(const ScenarioConfig& cfg, bool blockage_enabled) {
  const auto route = build_route(cfg.route);
  const Micros dwell = from_seconds(cfg.route.spacing_m / cfg.route.speed_mps);

  ChannelTrace trace;
  trace.route_hash = route_hash(cfg.route);
  trace.seed = cfg.seed;
  trace.horizon = route.back().t + dwell;

  // Sample instants: every route position plus every blockage epoch.
  std::set<std::int64_t> instants;
  for (const auto& p : route) instants.insert(p.t.count());
  const bool any_blocked = blockage_enabled && cfg.blockage.enabled &&
                           (cfg.blockage.apply_lte || cfg.blockage.apply_mmwave);
  if (any_blocked) {
    for (std::int64_t t = 0; t < trace.horizon.count(); t += cfg.blockage.t_blk.count()) {
      instants.insert(t);
    }
  }

  struct TechRays {
    TechKind kind;
    // rays[position][bs index]; empty RaySet when the BS lacks the technology.
    std::vector<std::vector<RaySet>> rays;
  };
  std::vector<TechRays> per_tech;
  for (auto kind : {TechKind::LTE, TechKind::MMWAVE}) {
    TechRays tr{kind, {}};
    const auto& tc = cfg.tech(kind);
    tr.rays.resize(route.size());
    for (std::size_t i = 0; i < route.size(); ++i) {
      for (const auto& bs : cfg.base_stations) {
        const bool has = kind == TechKind::LTE ? bs.lte : bs.mmwave;
        if (!has) {
          tr.rays[i].push_back(RaySet{bs.id, 0.0, route[i].heading_deg, {}});
          continue;
        }
        Rng rng(derive_seed(cfg.seed, {kRayStream, static_cast<std::uint64_t>(kind), i,
                                       static_cast<std::uint64_t>(bs.id)}));
        tr.rays[i].push_back(
            generate_rays(route[i], bs, cfg.ue_height_m, tc, is_los(bs, route[i].arc_m), rng));
      }
    }
    per_tech.push_back(std::move(tr));
  }

  std::int64_t cached_epoch = -1;
  BlockageState blockage;
  std::size_t pos = 0;
  for (std::int64_t t : instants) {
    while (pos + 1 < route.size() && route[pos + 1].t.count() <= t) ++pos;
    if (any_blocked) {
      const std::int64_t epoch = t / cfg.blockage.t_blk.count();
      if (epoch != cached_epoch) {
        Rng rng(derive_seed(cfg.seed, {kBlockageStream, static_cast<std::uint64_t>(epoch)}));
        blockage = sample_blockage(rng, cfg.blockage);
        cached_epoch = epoch;
      }
    }
    for (const auto& tr : per_tech) {
      const auto& tc = cfg.tech(tr.kind);
      const bool blocked = any_blocked && (tr.kind == TechKind::LTE ? cfg.blockage.apply_lte
                                                                     : cfg.blockage.apply_mmwave);
      const auto& at = tr.rays[pos];
      const auto budget = uplink_budget(tc);
      for (std::size_t b = 0; b < cfg.base_stations.size(); ++b) {
        const auto& bs = cfg.base_stations[b];
        const bool has = tr.kind == TechKind::LTE ? bs.lte : bs.mmwave;
        if (!has) continue;
        const RaySet serving = blocked ? apply_blockage(at[b], blockage, cfg.blockage) : at[b];
        // Interferers use unblocked rays, so blockage can only lower SINR.
        std::vector<RaySet> others;
        for (std::size_t o = 0; o < at.size(); ++o) {
          if (o != b && !at[o].rays.empty()) others.push_back(at[o]);
        }
        trace.samples.push_back(
            {Micros{t}, bs.id, tr.kind, compute_sinr(serving, others, budget), std::nullopt});
      }
    }
  }
  std::stable_sort(trace.samples.begin(), trace.samples.end(), [](const auto& a, const auto& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.bs_id != b.bs_id) return a.bs_id < b.bs_id;
    return a.tech < b.tech;
  });
  return trace;
}

}  // namespace

ChannelTrace synthesize_trace(const ScenarioConfig& cfg) { return synthesize(cfg, true); }
ChannelTrace synthesize_trace_unblocked(const ScenarioConfig& cfg) { return synthesize(cfg, false); }

// ---------------------------------------------------------------------------
// Trace CSV

void export_trace(const ChannelTrace& trace, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  const bool has_rate = std::any_of(trace.samples.begin(), trace.samples.end(),
                                    [](const auto& s) { return s.rate_bps.has_value(); });
  out << "# route_hash=" << trace.route_hash << "\n";
  out << "# seed=" << trace.seed << "\n";
  out << "# horizon_s=" << csv::format_seconds(trace.horizon) << "\n";
  out << (has_rate ? "t_s,bs_id,tech,sinr_db,rate_mbps\n" : "t_s,bs_id,tech,sinr_db\n");
  for (const auto& s : trace.samples) {
    out << csv::format_seconds(s.t) << ',' << s.bs_id << ',' << to_string(s.tech) << ',';
    if (s.sinr_db) out << fmt::format("{}", *s.sinr_db);
    if (has_rate) {
      out << ',';
      if (s.rate_bps) out << fmt::format("{}", *s.rate_bps / kBitsPerMbit);
    }
    out << '\n';
  }
}

ChannelTrace import_trace(const std::filesystem::path& path) {
  auto in = csv::open_in(path);
  ChannelTrace trace;
  std::string text;
  std::size_t line = 0;
  std::optional<csv::Header> header;
  std::optional<std::size_t> c_t, c_bs, c_tech, c_sinr, c_rate;
  bool horizon_given = false;
  const auto where = [&] { return fmt::format("{}: line {}", path.string(), line); };

  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    if (text.front() == '#') {
      std::string_view meta(text);
      meta.remove_prefix(1);
      while (!meta.empty() && meta.front() == ' ') meta.remove_prefix(1);
      auto eq = meta.find('=');
      if (eq == std::string_view::npos) continue;
      auto key = meta.substr(0, eq);
      auto value = meta.substr(eq + 1);
      if (key == "route_hash") trace.route_hash = std::string(value);
      if (key == "seed") trace.seed = static_cast<std::uint64_t>(csv::to_int(value, line, "seed"));
      if (key == "horizon_s") {
        trace.horizon = csv::to_micros(value, line, "horizon_s");
        horizon_given = true;
      }
      continue;
    }
    if (!header) {
      header.emplace(text);
      c_t = header->require("t_s", path);
      c_bs = header->require("bs_id", path);
      c_tech = header->require("tech", path);
      c_sinr = header->find("sinr_db");
      c_rate = header->find("rate_mbps");
      if (!c_sinr && !c_rate) {
        throw ParseError(fmt::format("{}: trace needs a sinr_db or rate_mbps column", where()));
      }
      continue;
    }
    auto fields = csv::split(text);
    if (fields.size() != header->size()) {
      throw ParseError(fmt::format("{}: expected {} fields, got {}", where(), header->size(),
                                   fields.size()));
    }
    try {
      TraceSample s;
      s.t = csv::to_micros(fields[*c_t], line, "t_s");
      s.bs_id = static_cast<int>(csv::to_int(fields[*c_bs], line, "bs_id"));
      s.tech = parse_tech(fields[*c_tech]);
      if (c_sinr && !fields[*c_sinr].empty()) s.sinr_db = csv::to_double(fields[*c_sinr], line, "sinr_db");
      if (c_rate && !fields[*c_rate].empty()) {
        s.rate_bps = csv::to_double(fields[*c_rate], line, "rate_mbps") * kBitsPerMbit;
      }
      if (!trace.samples.empty() && s.t < trace.samples.back().t) {
        throw ParseError(fmt::format("{}: timestamps not sorted", where()));
      }
      trace.samples.push_back(s);
    } catch (const ParseError& e) {
      std::string msg = e.what();
      if (msg.rfind(path.string(), 0) == 0) throw;
      throw ParseError(fmt::format("{}: {}", path.string(), msg));
    }
  }
  if (!header) throw ParseError(fmt::format("{}: missing header", path.string()));
  if (!horizon_given) {
    // Without metadata the last sample holds for one more inter-sample step.
    if (trace.samples.size() >= 2) {
      Micros step{0};
      for (std::size_t i = trace.samples.size(); i-- > 1;) {
        if (trace.samples[i].t != trace.samples[i - 1].t) {
          step = trace.samples[i].t - trace.samples[i - 1].t;
          break;
        }
      }
      trace.horizon = trace.samples.back().t + step;
    } else if (!trace.samples.empty()) {
      trace.horizon = trace.samples.back().t + Micros{1};
    }
  }
  return trace;
}

}  // namespace mecsim
