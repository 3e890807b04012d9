#include "mecsim/airlink.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <stdexcept>

#include "mecsim/rng.hpp"

namespace mecsim {

double LinkParams::share() const {
  if (tech.duplex == Duplex::FDD) return 1.0;
  return dir == Direction::UL ? ul_share : 1.0 - ul_share;
}

LinkParams LinkParams::from(const TechConfig& cfg, Direction dir) {
  LinkParams p;
  p.tech = cfg.tech;
  p.dir = dir;
  p.se_cap_bps_hz = cfg.se_cap_bps_hz;
  p.min_sinr_db = cfg.min_sinr_db;
  p.ul_share = cfg.tech.duplex == Duplex::FDD ? 1.0 : cfg.ul_share;
  p.harq_rtx_delay = cfg.harq_rtx_delay;
  p.max_rtx = cfg.max_rtx;
  p.bler = cfg.bler;
  p.processing = dir == Direction::UL ? cfg.ul_processing : cfg.dl_processing;
  return p;
}

double sinr_to_rate(double sinr_db, const LinkParams& params) {
  if (!(sinr_db >= params.min_sinr_db)) return 0.0;
  const double se = std::min(params.se_cap_bps_hz, std::log2(1.0 + std::pow(10.0, sinr_db / 10.0)));
  return params.tech.bandwidth_to_ue_hz() * params.share() * se;
}

double packet_error_prob(double sinr_db, const BlerModel& bler) {
  const double p = 1.0 / (1.0 + std::exp(-(bler.sinr_ref_db - sinr_db) * bler.slope));
  if (std::isnan(p)) return 0.5;
  return std::clamp(p, 0.0, 1.0);
}

Micros frame_alignment_delay(Micros t_arrival, const Technology& tech) {
  const auto slot = tech.slot.count();
  auto r = t_arrival.count() % slot;
  if (r < 0) r += slot;
  return Micros{r == 0 ? 0 : slot - r};
}

// ---------------------------------------------------------------------------
// LinkSeries

LinkSeries::LinkSeries(std::vector<Segment> segments, TechKind tech, Micros horizon)
    : segments_(std::move(segments)), tech_(tech), horizon_(horizon) {
  if (segments_.empty()) throw std::invalid_argument("empty link trace");
  if (!std::is_sorted(segments_.begin(), segments_.end(),
                      [](const auto& a, const auto& b) { return a.t < b.t; })) {
    throw std::invalid_argument("link trace not sorted");
  }
}

LinkSeries LinkSeries::from_trace(const ChannelTrace& trace, TechKind tech, const LinkParams& params,
                                  double sinr_offset_db) {
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < trace.samples.size();) {
    const Micros t = trace.samples[i].t;
    std::optional<Segment> best;
    for (; i < trace.samples.size() && trace.samples[i].t == t; ++i) {
      const auto& s = trace.samples[i];
      if (s.tech != tech) continue;
      Segment cand{t, 0.0, std::nullopt, s.bs_id};
      if (s.rate_bps) {
        cand.rate_bps = *s.rate_bps;
        if (s.sinr_db) cand.sinr_db = *s.sinr_db + sinr_offset_db;
      } else if (s.sinr_db) {
        cand.sinr_db = *s.sinr_db + sinr_offset_db;
        cand.rate_bps = sinr_to_rate(*cand.sinr_db, params);
      }
      auto better = [&](const Segment& a, const Segment& b) {
        if (a.rate_bps != b.rate_bps) return a.rate_bps > b.rate_bps;
        return a.sinr_db.value_or(-1e300) > b.sinr_db.value_or(-1e300);
      };
      if (!best || better(cand, *best)) best = cand;
    }
    if (best) segs.push_back(*best);
  }
  if (segs.empty()) {
    throw std::invalid_argument(fmt::format("trace has no {} samples", to_string(tech)));
  }
  Micros horizon = trace.horizon > segs.back().t ? trace.horizon : segs.back().t + Micros{1};
  return LinkSeries(std::move(segs), tech, horizon);
}

LinkSeries LinkSeries::constant(double rate_bps, Micros horizon, TechKind tech,
                                std::optional<double> sinr_db, int bs_id) {
  return LinkSeries({Segment{Micros{0}, rate_bps, sinr_db, bs_id}}, tech, horizon);
}

std::size_t LinkSeries::index_at(Micros t) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](Micros v, const Segment& s) { return v < s.t; });
  if (it == segments_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(segments_.begin(), it) - 1);
}

const LinkSeries::Segment& LinkSeries::at(Micros t) const { return segments_[index_at(t)]; }

std::optional<Micros> LinkSeries::finish_time(Micros start, double bits) const {
  std::size_t i = index_at(start);
  double remaining = bits;
  double t = static_cast<double>(start.count());
  while (true) {
    const double rate = segments_[i].rate_bps;
    const bool last = i + 1 >= segments_.size();
    const double end = last ? INFINITY : static_cast<double>(segments_[i + 1].t.count());
    if (rate > 0.0) {
      const double need_us = remaining * 1e6 / rate;
      if (t + need_us <= end + 1e-6) {
        // Round up to the clock; a tiny slack absorbs floating noise.
        return Micros{static_cast<Micros::rep>(std::ceil(t + need_us - 1e-6))};
      }
      remaining -= rate * (end - t) / 1e6;
    } else if (last) {
      return std::nullopt;
    }
    t = std::max(t, end);
    ++i;
  }
}

double LinkSeries::capacity_bits(Micros a, Micros b) const {
  if (b <= a) return 0.0;
  double total = 0.0;
  std::size_t i = index_at(a);
  Micros t = a;
  while (t < b) {
    const Micros end = i + 1 < segments_.size() ? std::min(b, segments_[i + 1].t) : b;
    if (end > t) total += segments_[i].rate_bps * static_cast<double>((end - t).count()) / 1e6;
    t = std::max(t, end);
    ++i;
    if (i >= segments_.size()) {
      if (t < b) total += segments_.back().rate_bps * static_cast<double>((b - t).count()) / 1e6;
      break;
    }
  }
  return total;
}

double LinkSeries::max_rate() const {
  double m = 0.0;
  for (const auto& s : segments_) m = std::max(m, s.rate_bps);
  return m;
}

// ---------------------------------------------------------------------------
// LinkSimulator

LinkSimulator::LinkSimulator(LinkSeries series, LinkParams params, std::uint64_t seed)
    : series_(std::move(series)), params_(params), seed_(seed) {
  if (params_.max_rtx < 1) throw std::invalid_argument("max_rtx must be at least 1");
}

void LinkSimulator::submit(std::int64_t id, Micros arrival, std::int64_t size_bits) {
  if (size_bits <= 0) throw std::invalid_argument("packet size must be positive");
  if (!fresh_.empty() && arrival < fresh_.back().arrival) {
    throw std::invalid_argument("arrivals must be nondecreasing");
  }
  if (arrival < last_decision_) throw std::invalid_argument("arrival precedes a committed decision");
  fresh_.push_back(Pending{id, arrival, size_bits, 0, arrival, 0});
}

std::optional<Micros> LinkSimulator::next_decision_time() const {
  const bool harq_full = static_cast<int>(retx_.size()) >= params_.tech.n_harq;
  std::optional<Micros> cand;
  if (!retx_.empty()) cand = retx_.top().ready;
  if (!fresh_.empty() && !harq_full) {
    cand = cand ? std::min(*cand, fresh_.front().arrival) : fresh_.front().arrival;
  }
  if (!cand) return std::nullopt;
  return std::max(server_free_, *cand);
}

std::vector<LinkEvent> LinkSimulator::step() {
  std::vector<LinkEvent> out;
  const auto when = next_decision_time();
  if (!when) return out;
  const Micros d = *when;
  last_decision_ = d;

  Pending pkt;
  if (!retx_.empty() && retx_.top().ready <= d) {
    pkt = retx_.top();
    retx_.pop();
  } else {
    pkt = fresh_.front();
    fresh_.pop_front();
  }

  // A packet waits for the next slot boundary after it becomes ready; a
  // backlogged server then transmits back to back.
  const Micros start = std::max(server_free_, pkt.ready + frame_alignment_delay(pkt.ready, params_.tech));
  const auto& seg = series_.at(start);
  pkt.bs_id = seg.bs_id;
  ++pkt.attempts;

  PacketRecord rec;
  rec.id = pkt.id;
  rec.dir = params_.dir;
  rec.size_bits = pkt.size_bits;
  rec.t_sent = pkt.arrival;
  rec.link = LinkId{seg.bs_id, series_.tech()};
  rec.n_transmissions = pkt.attempts;

  const auto finish = series_.finish_time(start, static_cast<double>(pkt.size_bits));
  if (!finish) {
    // Capacity never returns: the packet can not be served.
    server_free_ = start;
    out.push_back({rec, start});
    return out;
  }
  server_free_ = *finish;

  bool failed = false;
  if (seg.sinr_db) {
    const double p = packet_error_prob(*seg.sinr_db, params_.bler);
    failed = hash_uniform(seed_, {static_cast<std::uint64_t>(pkt.id),
                                  static_cast<std::uint64_t>(pkt.attempts)}) < p;
  }
  if (!failed) {
    rec.t_delivered = *finish + params_.processing;
    out.push_back({rec, *finish});
  } else if (pkt.attempts >= params_.max_rtx) {
    out.push_back({rec, *finish});
  } else {
    pkt.ready = *finish + params_.harq_rtx_delay;
    retx_.push(pkt);
  }
  return out;
}

std::vector<LinkEvent> LinkSimulator::run_to_completion() {
  std::vector<LinkEvent> out;
  while (next_decision_time()) {
    auto evs = step();
    out.insert(out.end(), evs.begin(), evs.end());
  }
  return out;
}

std::vector<PacketRecord> simulate_link(const LinkSeries& series, std::span<const OfferedPacket> offered,
                                        const LinkParams& params, std::uint64_t seed) {
  LinkSimulator link(series, params, seed);
  for (const auto& p : offered) link.submit(p.id, p.t, p.size_bits);
  std::vector<PacketRecord> out;
  for (auto& ev : link.run_to_completion()) out.push_back(std::move(ev.record));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::vector<PacketRecord> simulate_link(const ChannelTrace& trace, std::span<const OfferedPacket> offered,
                                        const LinkParams& params, std::uint64_t seed) {
  if (trace.samples.empty()) throw std::invalid_argument("empty trace");
  return simulate_link(LinkSeries::from_trace(trace, params.tech.kind, params), offered, params, seed);
}

}  // namespace mecsim
