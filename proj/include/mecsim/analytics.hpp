#pragma once

// Evaluation metrics over packet logs: delay-constrained throughput per frame
// interval, multi-connectivity fallback, availability, camera-support
// heatmaps, and empirical CDFs.

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "mecsim/airlink.hpp"
#include "mecsim/model.hpp"

namespace mecsim {

struct RateSeries {
  FrameGrid grid{1'000'000'000, 30'000};
  double d_max_ms = 0.0;
  std::vector<double> bps;

  Micros horizon() const { return grid.start(static_cast<std::int64_t>(bps.size())); }
  friend bool operator==(const RateSeries&, const RateSeries&) = default;
};

/// Pairs each uplink packet with a feedback (downlink) packet: the first one
/// sent in the uplink packet's own frame interval, else the nearest preceding
/// one.
class RttPairing {
 public:
  static constexpr Micros kLost{std::numeric_limits<Micros::rep>::max()};

  RttPairing(std::span<const PacketRecord> dl_log, const FrameGrid& grid);
  /// Feedback delay for an uplink packet sent at `ul_sent`; kLost when the
  /// paired feedback packet was dropped; nullopt when there is none.
  std::optional<Micros> feedback_delay(Micros ul_sent) const;

 private:
  struct Entry {
    std::int64_t interval;
    Micros t_sent;
    Micros delay;
  };
  FrameGrid grid_;
  std::vector<Entry> entries_;
};

/// Horizon covered by the logs: one past the latest send time.
Micros log_horizon(std::span<const PacketRecord> ul_log, std::span<const PacketRecord> dl_log);

/// Per interval: bits of uplink packets sent in the interval whose uplink
/// delay plus paired feedback delay is at most d_max, divided by T.
/// `horizon` defaults to the log horizon.
RateSeries delay_constrained_throughput(std::span<const PacketRecord> ul_log,
                                        std::span<const PacketRecord> dl_log, const FrameGrid& grid,
                                        double d_max_ms, std::optional<Micros> horizon = std::nullopt);

/// Unconstrained delivered rate per interval (every delivered uplink bit).
RateSeries delivered_throughput(std::span<const PacketRecord> ul_log, const FrameGrid& grid,
                                std::optional<Micros> horizon = std::nullopt);

RateSeries max_fallback(const RateSeries& a, const RateSeries& b);

double availability(const RateSeries& series, double required_bps);

struct HeatmapMatrix {
  std::vector<double> d_max_ms;
  std::vector<double> camera_rates_mbps;
  /// cells[row][n - 1]: availability of n cameras under d_max_ms[row].
  std::vector<std::vector<double>> cells;

  /// Cumulative rate required for the first n cameras.
  double required_mbps(std::size_t n) const;
};

HeatmapMatrix camera_support_matrix(std::span<const RateSeries> series_per_dmax,
                                    std::span<const double> camera_rates_mbps);
HeatmapMatrix camera_support_matrix(std::span<const PacketRecord> ul_log, std::span<const PacketRecord> dl_log,
                                    const FrameGrid& grid, std::span<const double> d_max_list_ms,
                                    std::span<const double> camera_rates_mbps,
                                    std::optional<Micros> horizon = std::nullopt);

struct CdfPoint {
  double value;
  double fraction;
  friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

std::vector<CdfPoint> empirical_cdf(std::span<const double> samples);
/// Smallest value whose cumulative fraction reaches q.
double quantile(std::span<const CdfPoint> cdf, double q);
double median(std::span<const double> samples);

struct RttSamples {
  std::vector<double> rtt_ms;
  /// Delivered uplink packets with no feedback packet at or before them.
  std::size_t unpaired = 0;
  /// Delivered uplink packets whose paired feedback packet was dropped.
  std::size_t feedback_lost = 0;
};

RttSamples rtt_per_frame(std::span<const PacketRecord> ul_log, std::span<const PacketRecord> dl_log,
                         const FrameGrid& grid);

}  // namespace mecsim
