#pragma once

// Synthetic dual-connectivity channel: route sampling, close-in path loss with
// a LOS/NLOS schedule, angular blockage regions, and per-BS SINR traces.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mecsim/model.hpp"
#include "mecsim/rng.hpp"

namespace mecsim {

class InvalidRoute : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RoutePoint {
  Vec2 position;
  double arc_m = 0.0;
  /// Direction of travel, degrees counter-clockwise from +x.
  double heading_deg = 0.0;
  Micros t{0};
};

/// Positions at exact arc-length multiples of `spacing_m` along the polyline,
/// endpoint inclusive when the length is a multiple of the spacing.
std::vector<RoutePoint> build_route(const RouteSpec& spec);
double route_length_m(const RouteSpec& spec);

/// Close-in path loss in dB. Distances below 1 m are clamped to 1 m.
double path_loss_db(double distance_m, double carrier_ghz, bool los, const PathLossParams& params);
/// Free-space path gain (negative dB) at the given distance.
double free_space_gain_db(double distance_m, double carrier_ghz);

bool is_los(const BaseStationSpec& bs, double arc_m);

struct Ray {
  double path_gain_db = 0.0;
  double aod_az_deg = 0.0;
  double aod_el_deg = 0.0;
  double aoa_az_deg = 0.0;
  double aoa_el_deg = 0.0;
  double excess_delay_s = 0.0;
  bool los = false;
};

struct RaySet {
  int bs_id = 0;
  double distance_m = 0.0;
  /// UE heading when the rays were traced; body-frame blockage uses it.
  double ue_heading_deg = 0.0;
  std::vector<Ray> rays;
};

/// LOS segments yield one LOS ray at the geometric angle plus scattered rays at
/// least `scatter_extra_loss_db` weaker; NLOS segments yield scattered rays only,
/// with total power equal to the NLOS path loss.
RaySet generate_rays(const RoutePoint& point, const BaseStationSpec& bs, double ue_height_m,
                     const TechConfig& tech, bool los, Rng& rng);

struct BlockageRegion {
  double az_center_deg = 0.0;
  double az_spread_deg = 0.0;
  double el_center_deg = 0.0;
  double el_spread_deg = 0.0;
  /// Self-blocking regions are in the wearer's body frame (azimuth relative
  /// to the heading); the others are in the global frame.
  bool self = false;

  bool contains(double az_deg, double el_deg, double heading_deg) const;
};

struct BlockageState {
  std::vector<BlockageRegion> regions;
};

BlockageState sample_blockage(Rng& rng, const BlockageParams& params);

/// Attenuates each ray by the strongest region it falls in (max, not sum).
RaySet apply_blockage(const RaySet& rays, const BlockageState& state, const BlockageParams& params);

struct LinkBudget {
  double tx_power_dbm = 0.0;
  double noise_figure_db = 0.0;
  double array_gain_db = 0.0;
  double bandwidth_hz = 0.0;
  double interference_factor = 0.0;
};

constexpr double kOutageSinrDb = -30.0;

double noise_power_dbm(double bandwidth_hz, double noise_figure_db);
/// -inf when the set has no rays.
double received_power_dbm(const RaySet& rays, double tx_power_dbm, double array_gain_db);

/// SINR of the serving BS, or nullopt (outage) when it has no rays or the
/// SINR is below kOutageSinrDb.
std::optional<double> compute_sinr(const RaySet& serving, std::span<const RaySet> interferers,
                                   const LinkBudget& budget);

LinkBudget uplink_budget(const TechConfig& tech);

struct TraceSample {
  Micros t{0};
  int bs_id = 0;
  TechKind tech = TechKind::LTE;
  /// nullopt marks outage.
  std::optional<double> sinr_db;
  /// Present only for imported rate traces; bypasses SINR-to-rate mapping.
  std::optional<double> rate_bps;
  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

struct ChannelTrace {
  std::vector<TraceSample> samples;
  std::string route_hash;
  std::uint64_t seed = 0;
  Micros horizon{0};
  friend bool operator==(const ChannelTrace&, const ChannelTrace&) = default;
};

/// Uplink SINR per (time, BS, technology) along the route. Samples are taken
/// at every route timestamp and every blockage re-draw.
ChannelTrace synthesize_trace(const ScenarioConfig& cfg);

/// Variant used for property checks: blockage forced off.
ChannelTrace synthesize_trace_unblocked(const ScenarioConfig& cfg);

std::string route_hash(const RouteSpec& spec);

void export_trace(const ChannelTrace& trace, const std::filesystem::path& path);
ChannelTrace import_trace(const std::filesystem::path& path);

}  // namespace mecsim
