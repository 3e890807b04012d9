#pragma once

// Shared domain vocabulary for the offloading simulator: resolutions,
// radio technologies, time/rate units, and the scenario configuration that
// every pipeline stage consumes.
//
// Time is integer microseconds (`Micros`); rates are bits per second.
// Mbps and milliseconds only appear at I/O boundaries.

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mecsim {

using Micros = std::chrono::microseconds;

constexpr double kBitsPerMbit = 1e6;

constexpr double to_ms(Micros t) { return static_cast<double>(t.count()) / 1e3; }
constexpr double to_seconds(Micros t) { return static_cast<double>(t.count()) / 1e6; }
Micros from_ms(double ms);
Micros from_seconds(double s);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Resolutions

enum class Resolution { WVGA, R720P, R1080P, R2p2K };

struct ResolutionInfo {
  Resolution id;
  std::string_view name;
  int width;
  int height;
  constexpr std::int64_t pixels() const { return std::int64_t{width} * height; }
};

constexpr ResolutionInfo resolution_info(Resolution r) {
  switch (r) {
    case Resolution::WVGA: return {r, "WVGA", 672, 378};
    case Resolution::R720P: return {r, "720P", 1280, 720};
    case Resolution::R1080P: return {r, "1080P", 1920, 1080};
    case Resolution::R2p2K: return {r, "2.2K", 2208, 1242};
  }
  return {r, "?", 0, 0};
}

inline constexpr Resolution kAllResolutions[] = {Resolution::WVGA, Resolution::R720P,
                                                 Resolution::R1080P, Resolution::R2p2K};

std::string_view to_string(Resolution r);
/// Accepts the display names ("WVGA", "720P", "1080P", "2.2K") and "2p2K".
Resolution parse_resolution(std::string_view s);

// ---------------------------------------------------------------------------
// Technologies

enum class TechKind { LTE, MMWAVE };
enum class Duplex { FDD, TDD };
enum class Direction { UL, DL };

std::string_view to_string(TechKind t);
TechKind parse_tech(std::string_view s);
std::string_view to_string(Direction d);
Direction parse_direction(std::string_view s);

struct Technology {
  TechKind kind = TechKind::LTE;
  double carrier_ghz = 1.9;
  /// Total system bandwidth per direction (FDD) or shared (TDD).
  double total_bandwidth_mhz = 40.0;
  double loading_fraction = 0.25;
  Duplex duplex = Duplex::FDD;
  Micros slot{1000};
  int n_harq = 8;

  double bandwidth_to_ue_mhz() const { return total_bandwidth_mhz * loading_fraction; }
  double bandwidth_to_ue_hz() const { return bandwidth_to_ue_mhz() * 1e6; }

  static Technology lte();
  static Technology mmwave();
};

// ---------------------------------------------------------------------------
// Geometry and channel parameters

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct RouteSpec {
  std::vector<Vec2> waypoints;
  double spacing_m = 1.0;
  /// Typical walking pace.
  double speed_mps = 1.4;
};

/// Closed arc-length interval [begin_m, end_m] along the route.
struct ArcInterval {
  double begin_m = 0.0;
  double end_m = 0.0;
  bool contains(double s) const { return s >= begin_m && s <= end_m; }
};

struct BaseStationSpec {
  int id = 0;
  Vec2 position;
  double height_m = 10.0;
  bool lte = true;
  bool mmwave = true;
  /// Route stretches where this site has no line of sight to the UE.
  std::vector<ArcInterval> nlos;
};

/// Close-in path loss: PL0(fc) + 10 n log10(d / 1 m), plus an NLOS offset.
struct PathLossParams {
  double n_los = 2.0;
  double n_nlos = 3.0;
  double nlos_offset_db = 10.0;
};

struct RayParams {
  /// Scattered (non-LOS) rays generated per (position, BS).
  int n_scatter = 4;
  /// Loss of the strongest scattered ray relative to the LOS geometry.
  double scatter_extra_loss_db = 20.0;
  /// Weaker scattered rays lose a further U(0, spread) dB.
  double scatter_spread_db = 10.0;
};

struct BlockageParams {
  bool enabled = true;
  int k_nsb = 40;
  Micros t_blk{100'000};
  bool self_blocking = true;
  double self_attenuation_db = 30.0;
  double nsb_attenuation_db = 20.0;
  // Self-blocking region sits behind the wearer (heading + 180 deg).
  double self_az_spread_deg = 120.0;
  double self_el_center_deg = 0.0;
  double self_el_spread_deg = 90.0;
  // Non-self-blocking regions: centers uniform in azimuth, spreads uniform in bounds.
  double nsb_az_spread_min_deg = 15.0;
  double nsb_az_spread_max_deg = 45.0;
  double nsb_el_center_deg = 0.0;
  double nsb_el_spread_min_deg = 5.0;
  double nsb_el_spread_max_deg = 15.0;
  bool apply_lte = false;
  bool apply_mmwave = true;
};

struct BlerModel {
  double sinr_ref_db = -3.0;
  double slope = 1.0;
};

/// Everything needed to model one radio technology end to end.
struct TechConfig {
  Technology tech;
  double ue_tx_power_dbm = 25.0;
  double bs_tx_power_dbm = 30.0;
  double ul_noise_figure_db = 5.0;
  double dl_noise_figure_db = 5.0;
  int ue_array_elements = 1;
  int bs_array_elements = 1;
  double interference_factor = 0.25;
  PathLossParams path_loss;
  RayParams rays;
  double se_cap_bps_hz = 3.6;
  double min_sinr_db = -5.0;
  /// Fraction of TDD symbols used for uplink; ignored (1.0) for FDD.
  double ul_share = 1.0;
  Micros harq_rtx_delay{8000};
  /// Maximum transmission attempts per packet before it is dropped.
  int max_rtx = 4;
  BlerModel bler;
  /// Fixed per-packet MAC/RLC pipeline latency, per direction.
  Micros ul_processing{0};
  Micros dl_processing{0};

  double array_gain_db() const;

  static TechConfig lte_defaults();
  static TechConfig mmwave_defaults();
};

// ---------------------------------------------------------------------------
// Traffic

struct AimdParams {
  double probe_step_bps = 2e6;
  double backoff = 0.9;
  double min_rate_bps = 1e6;
  double initial_rate_bps = 5e6;
  /// Extra return-path latency of acknowledgements beyond 2 x D_core.
  Micros ack_extra{1000};
};

struct TransportParams {
  double ul_cap_bps = 120e6;
  std::int64_t ul_pkt_bits = 8192;
  double dl_rate_bps = 1e6;
  double dl_pkts_per_s = 30.0;
  Micros d_core{5000};
  AimdParams cc;

  std::int64_t dl_pkt_bits() const;
};

// ---------------------------------------------------------------------------
// Policy

enum class CameraStrategy { UNIFORM, PRIORITY };
std::string_view to_string(CameraStrategy s);
CameraStrategy parse_strategy(std::string_view s);

struct PolicyParams {
  CameraStrategy strategy = CameraStrategy::UNIFORM;
  std::vector<double> total_targets_ms{100.0, 150.0};
  std::vector<double> dmax_grid_ms{30.0, 40.0, 50.0};
  /// RTT used for the delay budget of edge decisions (median of the active link).
  double edge_rtt_ms = 15.0;
};

// ---------------------------------------------------------------------------
// Frame intervals

/// Frame grid with a rational period of `num_us / den` microseconds. Interval k
/// covers [start(k), start(k+1)) with start(k) = floor(k * num_us / den), so the
/// intervals tile the time axis exactly in integer microseconds.
class FrameGrid {
 public:
  FrameGrid(std::int64_t num_us, std::int64_t den);
  static FrameGrid from_hz(double frame_hz);

  Micros start(std::int64_t k) const;
  std::int64_t index_of(Micros t) const;
  /// Number of intervals needed to cover [0, horizon).
  std::int64_t count(Micros horizon) const;
  double period_seconds() const { return static_cast<double>(num_us_) / (static_cast<double>(den_) * 1e6); }
  std::int64_t num_us() const { return num_us_; }
  std::int64_t den() const { return den_; }
  friend bool operator==(const FrameGrid&, const FrameGrid&) = default;

 private:
  std::int64_t num_us_;
  std::int64_t den_;
};

struct FrameInterval {
  std::int64_t index = 0;
  Micros t_start{0};
  Micros duration{0};
};

FrameInterval frame_interval(const FrameGrid& grid, std::int64_t k);

// ---------------------------------------------------------------------------
// Scenario

struct ScenarioConfig {
  RouteSpec route;
  std::vector<BaseStationSpec> base_stations;
  TechConfig lte = TechConfig::lte_defaults();
  TechConfig mmwave = TechConfig::mmwave_defaults();
  BlockageParams blockage;
  TransportParams traffic;
  PolicyParams policy;
  double frame_hz = 30.0;
  double ue_height_m = 1.5;
  std::uint64_t seed = 1;

  const TechConfig& tech(TechKind k) const { return k == TechKind::LTE ? lte : mmwave; }

  /// Two-site route with an NLOS stretch, used when no config file is given.
  static ScenarioConfig defaults();
};

/// Empty iff every invariant of the configuration holds. Each entry names the
/// offending field.
std::vector<std::string> validate_config(const ScenarioConfig& cfg);

}  // namespace mecsim
