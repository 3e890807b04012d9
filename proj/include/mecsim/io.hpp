#pragma once

// CSV schemas for packet logs and analytics outputs, plus SVG rendering.

#include <filesystem>
#include <span>
#include <vector>

#include "mecsim/airlink.hpp"
#include "mecsim/analytics.hpp"

namespace mecsim {

/// `id,dir,size_bits,t_sent_s,t_delivered_s,link,ntx,e2e_delay_ms`; a dropped packet has
/// empty t_delivered_s and e2e_delay_ms. `link` is `bs_id:tech`.
void write_packet_log(std::span<const PacketRecord> records, const std::filesystem::path& path);
/// Accepts extra columns (e.g. e2e_delay_ms); `link` and `ntx` are optional.
std::vector<PacketRecord> read_packet_log(const std::filesystem::path& path);

/// `interval,t_start_s,rate_mbps` with `# d_max_ms=...` and `# frame_period_us=num/den`
/// preamble.
void write_rate_series(const RateSeries& series, const std::filesystem::path& path);
RateSeries read_rate_series(const std::filesystem::path& path);

/// `d_max_ms,n_cameras,availability`; a `# camera_rates_mbps=...` preamble
/// keeps the cumulative labels recoverable.
void write_heatmap(const HeatmapMatrix& m, const std::filesystem::path& path);
HeatmapMatrix read_heatmap(const std::filesystem::path& path);

/// `value,fraction`.
void write_cdf(std::span<const CdfPoint> cdf, const std::filesystem::path& path);
std::vector<CdfPoint> read_cdf(const std::filesystem::path& path);

/// Availability grid, rows d_max and columns cumulative camera rate, on a
/// white (0) to dark blue (1) linear scale.
void write_heatmap_svg(const HeatmapMatrix& m, const std::filesystem::path& path);

}  // namespace mecsim
