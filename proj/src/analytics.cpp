#include "mecsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mecsim {

namespace {

Micros dmax_micros(double d_max_ms) { return from_ms(d_max_ms); }

void check_args(double d_max_ms) {
  if (!(d_max_ms >= 0)) throw std::invalid_argument("d_max must be non-negative");
}

}  // namespace

RttPairing::RttPairing(std::span<const PacketRecord> dl_log, const FrameGrid& grid) : grid_(grid) {
  entries_.reserve(dl_log.size());
  for (const auto& r : dl_log) {
    entries_.push_back({grid.index_of(r.t_sent), r.t_sent, r.delivered() ? *r.delay() : kLost});
  }
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) { return a.t_sent < b.t_sent; });
}

std::optional<Micros> RttPairing::feedback_delay(Micros ul_sent) const {
  const auto k = grid_.index_of(ul_sent);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), k,
                             [](const Entry& e, std::int64_t v) { return e.interval < v; });
  if (it != entries_.end() && it->interval == k) return it->delay;
  if (it == entries_.begin()) return std::nullopt;
  return std::prev(it)->delay;
}

Micros log_horizon(std::span<const PacketRecord> ul_log, std::span<const PacketRecord> dl_log) {
  Micros h{0};
  for (const auto& r : ul_log) h = std::max(h, r.t_sent + Micros{1});
  for (const auto& r : dl_log) h = std::max(h, r.t_sent + Micros{1});
  return h;
}

RateSeries delay_constrained_throughput(std::span<const PacketRecord> ul_log,
                                        std::span<const PacketRecord> dl_log, const FrameGrid& grid,
                                        double d_max_ms, std::optional<Micros> horizon) {
  check_args(d_max_ms);
  const Micros h = horizon.value_or(log_horizon(ul_log, dl_log));
  RateSeries out{grid, d_max_ms, std::vector<double>(static_cast<std::size_t>(grid.count(h)), 0.0)};
  std::vector<std::int64_t> bits(out.bps.size(), 0);

  const RttPairing pairing(dl_log, grid);
  const Micros limit = dmax_micros(d_max_ms);
  for (const auto& r : ul_log) {
    if (!r.delivered()) continue;
    const auto k = grid.index_of(r.t_sent);
    if (k < 0 || k >= static_cast<std::int64_t>(bits.size())) continue;
    const auto fb = pairing.feedback_delay(r.t_sent);
    if (!fb || *fb == RttPairing::kLost) continue;
    if (*r.delay() + *fb <= limit) bits[static_cast<std::size_t>(k)] += r.size_bits;
  }
  const double period = grid.period_seconds();
  for (std::size_t i = 0; i < bits.size(); ++i) out.bps[i] = static_cast<double>(bits[i]) / period;
  return out;
}

RateSeries delivered_throughput(std::span<const PacketRecord> ul_log, const FrameGrid& grid,
                                std::optional<Micros> horizon) {
  const Micros h = horizon.value_or(log_horizon(ul_log, {}));
  RateSeries out{grid, INFINITY, std::vector<double>(static_cast<std::size_t>(grid.count(h)), 0.0)};
  std::vector<std::int64_t> bits(out.bps.size(), 0);
  for (const auto& r : ul_log) {
    if (!r.delivered()) continue;
    const auto k = grid.index_of(r.t_sent);
    if (k < 0 || k >= static_cast<std::int64_t>(bits.size())) continue;
    bits[static_cast<std::size_t>(k)] += r.size_bits;
  }
  const double period = grid.period_seconds();
  for (std::size_t i = 0; i < bits.size(); ++i) out.bps[i] = static_cast<double>(bits[i]) / period;
  return out;
}

RateSeries max_fallback(const RateSeries& a, const RateSeries& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("rate series use different frame intervals");
  if (a.bps.size() != b.bps.size()) throw std::invalid_argument("rate series cover different horizons");
  if (a.d_max_ms != b.d_max_ms) throw std::invalid_argument("rate series use different delay constraints");
  RateSeries out = a;
  for (std::size_t i = 0; i < out.bps.size(); ++i) out.bps[i] = std::max(a.bps[i], b.bps[i]);
  return out;
}

double availability(const RateSeries& series, double required_bps) {
  if (series.bps.empty()) return 0.0;
  const auto n = std::count_if(series.bps.begin(), series.bps.end(),
                               [&](double v) { return v >= required_bps; });
  return static_cast<double>(n) / static_cast<double>(series.bps.size());
}

double HeatmapMatrix::required_mbps(std::size_t n) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < n && i < camera_rates_mbps.size(); ++i) sum += camera_rates_mbps[i];
  return sum;
}

HeatmapMatrix camera_support_matrix(std::span<const RateSeries> series_per_dmax,
                                    std::span<const double> camera_rates_mbps) {
  if (camera_rates_mbps.empty()) throw std::invalid_argument("camera rates must be nonempty");
  for (double r : camera_rates_mbps) {
    if (!(r > 0)) throw std::invalid_argument("camera rates must be positive");
  }
  HeatmapMatrix m;
  m.camera_rates_mbps.assign(camera_rates_mbps.begin(), camera_rates_mbps.end());
  for (const auto& s : series_per_dmax) {
    m.d_max_ms.push_back(s.d_max_ms);
    std::vector<double> row;
    for (std::size_t n = 1; n <= camera_rates_mbps.size(); ++n) {
      row.push_back(availability(s, m.required_mbps(n) * kBitsPerMbit));
    }
    m.cells.push_back(std::move(row));
  }
  return m;
}

HeatmapMatrix camera_support_matrix(std::span<const PacketRecord> ul_log, std::span<const PacketRecord> dl_log,
                                    const FrameGrid& grid, std::span<const double> d_max_list_ms,
                                    std::span<const double> camera_rates_mbps,
                                    std::optional<Micros> horizon) {
  std::vector<RateSeries> series;
  for (double d : d_max_list_ms) {
    series.push_back(delay_constrained_throughput(ul_log, dl_log, grid, d, horizon));
  }
  return camera_support_matrix(series, camera_rates_mbps);
}

std::vector<CdfPoint> empirical_cdf(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical CDF of an empty sample");
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  std::vector<CdfPoint> out;
  const auto n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
    out.push_back({v[i], static_cast<double>(i + 1) / n});
  }
  out.back().fraction = 1.0;
  return out;
}

double quantile(std::span<const CdfPoint> cdf, double q) {
  if (cdf.empty()) throw std::invalid_argument("quantile of an empty CDF");
  for (const auto& p : cdf) {
    if (p.fraction >= q) return p.value;
  }
  return cdf.back().value;
}

double median(std::span<const double> samples) {
  const auto cdf = empirical_cdf(samples);
  return quantile(cdf, 0.5);
}

RttSamples rtt_per_frame(std::span<const PacketRecord> ul_log, std::span<const PacketRecord> dl_log,
                         const FrameGrid& grid) {
  RttSamples out;
  const RttPairing pairing(dl_log, grid);
  for (const auto& r : ul_log) {
    if (!r.delivered()) continue;
    const auto fb = pairing.feedback_delay(r.t_sent);
    if (!fb) {
      ++out.unpaired;
      continue;
    }
    if (*fb == RttPairing::kLost) {
      ++out.feedback_lost;
      continue;
    }
    out.rtt_ms.push_back(to_ms(*r.delay() + *fb));
  }
  return out;
}

}  // namespace mecsim
