#include "mecsim/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "mecsim/csv.hpp"

namespace mecsim {

namespace pt = boost::property_tree;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> number(std::string_view s) {
  const auto t = trim(s);
  double v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size() || t.empty()) return std::nullopt;
  return v;
}

// Typed access to one section; records unknown keys and bad values.
class Section {
 public:
  Section(const pt::ptree& tree, std::string name, std::vector<std::string>& errors)
      : tree_(tree), name_(std::move(name)), errors_(errors) {}

  ~Section() {
    for (const auto& [key, child] : tree_) {
      if (!child.empty()) continue;
      if (!known_.count(key)) errors_.push_back(fmt::format("{}.{}: unknown key", name_, key));
    }
  }

  void num(const char* key, double& out) {
    if (auto s = raw(key)) {
      if (auto v = number(*s)) {
        out = *v;
      } else {
        bad(key, *s, "a number");
      }
    }
  }

  void integer(const char* key, int& out) {
    double v = out;
    const auto before = errors_.size();
    num(key, v);
    if (errors_.size() != before) return;
    if (v != static_cast<int>(v)) {
      bad(key, tree_.get<std::string>(key), "an integer");
      return;
    }
    out = static_cast<int>(v);
  }

  void flag(const char* key, bool& out) {
    if (auto s = raw(key)) {
      const auto t = trim(*s);
      if (t == "true" || t == "1" || t == "yes") {
        out = true;
      } else if (t == "false" || t == "0" || t == "no") {
        out = false;
      } else {
        bad(key, *s, "true or false");
      }
    }
  }

  /// Value given in ms, stored in integer microseconds.
  void ms(const char* key, Micros& out) {
    double v = to_ms(out);
    const auto before = errors_.size();
    num(key, v);
    if (errors_.size() == before) out = from_ms(v);
  }

  void list(const char* key, std::vector<double>& out) {
    if (auto s = raw(key)) {
      std::vector<double> v;
      for (auto item : csv::split(*s)) {
        auto x = number(item);
        if (!x) {
          bad(key, *s, "a comma-separated list of numbers");
          return;
        }
        v.push_back(*x);
      }
      out = std::move(v);
    }
  }

  template <typename F>
  void text(const char* key, F&& apply) {
    if (auto s = raw(key)) {
      try {
        apply(trim(*s));
      } catch (const std::exception& e) {
        errors_.push_back(fmt::format("{}.{}: {}", name_, key, e.what()));
      }
    }
  }

 private:
  std::optional<std::string> raw(const char* key) {
    known_.insert(key);
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return *v;
  }

  void bad(const char* key, const std::string& value, const char* want) {
    errors_.push_back(fmt::format("{}.{}: '{}' is not {}", name_, key, value, want));
  }

  const pt::ptree& tree_;
  std::string name_;
  std::vector<std::string>& errors_;
  std::set<std::string> known_;
};

std::vector<Vec2> parse_waypoints(const std::string& s) {
  std::vector<Vec2> out;
  for (auto pair : csv::split(s, ';')) {
    const auto xy = csv::split(pair, ',');
    if (xy.size() != 2) throw std::invalid_argument("waypoints are 'x,y; x,y; ...'");
    auto x = number(xy[0]);
    auto y = number(xy[1]);
    if (!x || !y) throw std::invalid_argument(fmt::format("bad waypoint '{}'", trim(pair)));
    out.push_back({*x, *y});
  }
  return out;
}

std::vector<ArcInterval> parse_intervals(const std::string& s) {
  std::vector<ArcInterval> out;
  if (s.empty()) return out;
  for (auto item : csv::split(s, ';')) {
    const auto ab = csv::split(item, ':');
    if (ab.size() != 2) throw std::invalid_argument("intervals are 'begin:end; ...' in m");
    auto a = number(ab[0]);
    auto b = number(ab[1]);
    if (!a || !b) throw std::invalid_argument(fmt::format("bad interval '{}'", trim(item)));
    out.push_back({*a, *b});
  }
  return out;
}

void read_tech(const pt::ptree& tree, const char* name, TechConfig& t, std::vector<std::string>& errors) {
  Section s(tree, name, errors);
  s.num("carrier_ghz", t.tech.carrier_ghz);
  s.num("bandwidth_mhz", t.tech.total_bandwidth_mhz);
  s.num("loading", t.tech.loading_fraction);
  s.text("duplex", [&](const std::string& v) {
    if (v == "FDD" || v == "fdd") {
      t.tech.duplex = Duplex::FDD;
    } else if (v == "TDD" || v == "tdd") {
      t.tech.duplex = Duplex::TDD;
    } else {
      throw std::invalid_argument(fmt::format("'{}' is not FDD or TDD", v));
    }
  });
  s.ms("slot_ms", t.tech.slot);
  s.integer("n_harq", t.tech.n_harq);
  s.num("ue_tx_dbm", t.ue_tx_power_dbm);
  s.num("bs_tx_dbm", t.bs_tx_power_dbm);
  s.num("ul_noise_figure_db", t.ul_noise_figure_db);
  s.num("dl_noise_figure_db", t.dl_noise_figure_db);
  s.integer("ue_elements", t.ue_array_elements);
  s.integer("bs_elements", t.bs_array_elements);
  s.num("interference_factor", t.interference_factor);
  s.num("pl_exponent_los", t.path_loss.n_los);
  s.num("pl_exponent_nlos", t.path_loss.n_nlos);
  s.num("pl_nlos_offset_db", t.path_loss.nlos_offset_db);
  s.integer("n_scatter", t.rays.n_scatter);
  s.num("scatter_extra_loss_db", t.rays.scatter_extra_loss_db);
  s.num("scatter_spread_db", t.rays.scatter_spread_db);
  s.num("se_cap", t.se_cap_bps_hz);
  s.num("min_sinr_db", t.min_sinr_db);
  s.num("ul_share", t.ul_share);
  s.ms("harq_rtx_delay_ms", t.harq_rtx_delay);
  s.integer("max_rtx", t.max_rtx);
  s.num("bler_ref_db", t.bler.sinr_ref_db);
  s.num("bler_slope", t.bler.slope);
  s.ms("ul_processing_ms", t.ul_processing);
  s.ms("dl_processing_ms", t.dl_processing);
}

void read_blockage(const pt::ptree& tree, BlockageParams& b, std::vector<std::string>& errors) {
  Section s(tree, "blockage", errors);
  s.flag("enabled", b.enabled);
  s.integer("k_nsb", b.k_nsb);
  s.ms("t_blk_ms", b.t_blk);
  s.flag("self_blocking", b.self_blocking);
  s.num("self_attenuation_db", b.self_attenuation_db);
  s.num("nsb_attenuation_db", b.nsb_attenuation_db);
  s.num("self_az_spread_deg", b.self_az_spread_deg);
  s.num("self_el_center_deg", b.self_el_center_deg);
  s.num("self_el_spread_deg", b.self_el_spread_deg);
  s.num("nsb_az_spread_min_deg", b.nsb_az_spread_min_deg);
  s.num("nsb_az_spread_max_deg", b.nsb_az_spread_max_deg);
  s.num("nsb_el_center_deg", b.nsb_el_center_deg);
  s.num("nsb_el_spread_min_deg", b.nsb_el_spread_min_deg);
  s.num("nsb_el_spread_max_deg", b.nsb_el_spread_max_deg);
  s.flag("apply_lte", b.apply_lte);
  s.flag("apply_mmwave", b.apply_mmwave);
}

void read_traffic(const pt::ptree& tree, ScenarioConfig& cfg, std::vector<std::string>& errors) {
  Section s(tree, "traffic", errors);
  auto& t = cfg.traffic;
  double ul_cap = t.ul_cap_bps / kBitsPerMbit;
  s.num("ul_cap_mbps", ul_cap);
  t.ul_cap_bps = ul_cap * kBitsPerMbit;
  int pkt_bytes = static_cast<int>(t.ul_pkt_bits / 8);
  s.integer("ul_packet_bytes", pkt_bytes);
  t.ul_pkt_bits = std::int64_t{pkt_bytes} * 8;
  double dl_rate = t.dl_rate_bps / kBitsPerMbit;
  s.num("dl_rate_mbps", dl_rate);
  t.dl_rate_bps = dl_rate * kBitsPerMbit;
  s.num("dl_packets_per_s", t.dl_pkts_per_s);
  s.ms("d_core_ms", t.d_core);
  s.num("frame_hz", cfg.frame_hz);
  double step = t.cc.probe_step_bps / kBitsPerMbit;
  s.num("aimd_step_mbps", step);
  t.cc.probe_step_bps = step * kBitsPerMbit;
  s.num("aimd_backoff", t.cc.backoff);
  double min_rate = t.cc.min_rate_bps / kBitsPerMbit;
  s.num("aimd_min_mbps", min_rate);
  t.cc.min_rate_bps = min_rate * kBitsPerMbit;
  double init_rate = t.cc.initial_rate_bps / kBitsPerMbit;
  s.num("aimd_initial_mbps", init_rate);
  t.cc.initial_rate_bps = init_rate * kBitsPerMbit;
  s.ms("ack_extra_ms", t.cc.ack_extra);
}

void read_policy(const pt::ptree& tree, PolicyParams& p, std::vector<std::string>& errors) {
  Section s(tree, "policy", errors);
  s.text("strategy", [&](const std::string& v) { p.strategy = parse_strategy(v); });
  s.list("targets_ms", p.total_targets_ms);
  s.list("dmax_ms", p.dmax_grid_ms);
  s.num("edge_rtt_ms", p.edge_rtt_ms);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error("invalid config: " + join(violations)), violations_(std::move(violations)) {}

ScenarioConfig parse_config(const std::string& text) {
  pt::ptree root;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({fmt::format("line {}: {}", e.line(), e.message())});
  }

  ScenarioConfig cfg = ScenarioConfig::defaults();
  std::vector<std::string> errors;
  static const pt::ptree empty;
  auto section = [&](const char* name) -> const pt::ptree& {
    auto c = root.get_child_optional(pt::ptree::path_type(name, '\0'));
    return c ? *c : empty;
  };

  bool custom_bs = false;
  std::map<int, BaseStationSpec> stations;
  for (const auto& [key, child] : root) {
    if (child.empty()) {
      if (key == "seed") {
        auto v = number(child.data());
        if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::uint64_t>(*v))) {
          errors.push_back(fmt::format("seed: '{}' is not a non-negative integer", child.data()));
        } else {
          cfg.seed = static_cast<std::uint64_t>(*v);
        }
      } else {
        errors.push_back(fmt::format("{}: unknown key", key));
      }
      continue;
    }
    static const std::set<std::string> sections{"route", "lte", "mmwave", "blockage", "traffic", "policy"};
    if (sections.count(key)) continue;
    if (key.rfind("bs.", 0) != 0) {
      errors.push_back(fmt::format("[{}]: unknown section", key));
      continue;
    }
    custom_bs = true;
    const auto id = number(key.substr(3));
    if (!id || *id != static_cast<int>(*id)) {
      errors.push_back(fmt::format("[{}]: base station sections are [bs.N] with integer N", key));
      continue;
    }
    BaseStationSpec bs;
    bs.id = static_cast<int>(*id);
    Section s(child, key, errors);
    s.num("x", bs.position.x);
    s.num("y", bs.position.y);
    s.num("height_m", bs.height_m);
    s.flag("lte", bs.lte);
    s.flag("mmwave", bs.mmwave);
    s.text("nlos_m", [&](const std::string& v) { bs.nlos = parse_intervals(v); });
    stations[bs.id] = bs;
  }
  if (custom_bs) {
    cfg.base_stations.clear();
    for (auto& [id, bs] : stations) cfg.base_stations.push_back(bs);
  }

  {
    Section s(section("route"), "route", errors);
    s.text("waypoints", [&](const std::string& v) { cfg.route.waypoints = parse_waypoints(v); });
    s.num("spacing_m", cfg.route.spacing_m);
    s.num("speed_mps", cfg.route.speed_mps);
    s.num("ue_height_m", cfg.ue_height_m);
  }
  read_tech(section("lte"), "lte", cfg.lte, errors);
  read_tech(section("mmwave"), "mmwave", cfg.mmwave, errors);
  read_blockage(section("blockage"), cfg.blockage, errors);
  read_traffic(section("traffic"), cfg, errors);
  read_policy(section("policy"), cfg.policy, errors);

  if (errors.empty()) errors = validate_config(cfg);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("{}: cannot open", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ScenarioConfig load_config(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return parse_config(text);
  } catch (const ConfigError& e) {
    auto v = e.violations();
    for (auto& s : v) s = path.string() + ": " + s;
    throw ConfigError(std::move(v));
  }
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string file_hash(const std::filesystem::path& path) { return config_hash(read_file(path)); }

}  // namespace mecsim
