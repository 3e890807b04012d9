#include "mecsim/transport.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>

namespace mecsim {

namespace {

constexpr Micros kNever{std::numeric_limits<Micros::rep>::max()};
constexpr Micros kMinRttWindow{10'000'000};

struct Feedback {
  Micros t;
  std::int64_t id;
  std::int64_t bits;
  Micros t_sent;
  bool delivered;
};

struct FeedbackLater {
  bool operator()(const Feedback& a, const Feedback& b) const {
    return a.t != b.t ? a.t > b.t : a.id > b.id;
  }
};

class AimdSender {
 public:
  AimdSender(const TransportParams& p) : p_(p), rate_(std::clamp(p.cc.initial_rate_bps, p.cc.min_rate_bps, p.ul_cap_bps)) {}

  double rate() const { return rate_; }
  std::int64_t inflight() const { return inflight_; }

  void on_send(std::int64_t bits) { inflight_ += bits; }

  void on_feedback(const Feedback& f) {
    inflight_ -= f.bits;
    if (f.delivered) {
      const Micros rtt = f.t - f.t_sent;
      srtt_us_ = srtt_us_ < 0 ? static_cast<double>(rtt.count())
                              : 0.875 * srtt_us_ + 0.125 * static_cast<double>(rtt.count());
      while (!min_rtt_.empty() && min_rtt_.back().second >= rtt) min_rtt_.pop_back();
      min_rtt_.emplace_back(f.t, rtt);
      if (acked_total_ == 0) first_ack_ = f.t;
      acked_total_ += f.bits;
      acked_.emplace_back(f.t, acked_total_);
    } else {
      backoff(f.t);
    }
    expire(f.t);
    update(f.t);
  }

  /// Hard window: stop sending while this many bits are unacknowledged.
  std::int64_t window_bits() const {
    const auto floor_bits = 16 * p_.ul_pkt_bits;
    if (min_rtt_.empty()) return 64 * p_.ul_pkt_bits;
    const double pipe = rate_ * to_seconds(min_rtt_.front().second);
    return std::max<std::int64_t>(floor_bits, static_cast<std::int64_t>(4.0 * pipe));
  }

  void update(Micros now) {
    expire(now);
    if (srtt_us_ < 0) return;
    const Micros srtt{static_cast<Micros::rep>(srtt_us_)};
    // Probe only while the path shows no standing queue.
    const bool queued = !min_rtt_.empty() && srtt_us_ > 1.25 * static_cast<double>(min_rtt_.front().second.count());
    if (now - last_probe_ >= srtt && !queued) {
      rate_ = std::min(p_.ul_cap_bps, rate_ + p_.cc.probe_step_bps);
      last_probe_ = now;
    }
    // The delivery rate needs one full window of acknowledgements.
    if (!min_rtt_.empty() && now - first_ack_ >= Micros{static_cast<Micros::rep>(rate_window_us())}) {
      const double min_rtt = to_seconds(min_rtt_.front().second);
      const double pipe = delivery_rate(now) * min_rtt;
      const double bdp = std::max(rate_ * min_rtt, 1.0 * p_.ul_pkt_bits);
      if (static_cast<double>(inflight_) > pipe + bdp) backoff(now);
    }
  }

 private:
  double rate_window_us() const { return std::max(srtt_us_, 10'000.0); }

  double delivery_rate(Micros now) const {
    const double window = rate_window_us();
    if (acked_.empty()) return 0.0;
    const Micros from = now - Micros{static_cast<Micros::rep>(window)};
    // acked_ holds (time, cumulative bits); find the last entry before the window.
    auto it = std::lower_bound(acked_.begin(), acked_.end(), from,
                               [](const auto& e, Micros t) { return e.first < t; });
    const std::int64_t base = it == acked_.begin() ? acked_base_ : std::prev(it)->second;
    return static_cast<double>(acked_.back().second - base) / (window / 1e6);
  }

  void backoff(Micros now) {
    if (srtt_us_ >= 0 && static_cast<double>((now - last_backoff_).count()) < srtt_us_) return;
    const double anchor = acked_.empty() ? rate_ : std::min(rate_, delivery_rate(now));
    rate_ = std::max(p_.cc.min_rate_bps, p_.cc.backoff * anchor);
    last_backoff_ = now;
    last_probe_ = now;
  }

  void expire(Micros now) {
    while (!min_rtt_.empty() && now - min_rtt_.front().first > kMinRttWindow) min_rtt_.pop_front();
    const double window = rate_window_us();
    while (!acked_.empty() && static_cast<double>((now - acked_.front().first).count()) > 4 * window) {
      acked_base_ = acked_.front().second;
      acked_.pop_front();
    }
  }

  const TransportParams& p_;
  double rate_;
  std::int64_t inflight_ = 0;
  double srtt_us_ = -1.0;
  std::deque<std::pair<Micros, Micros>> min_rtt_;
  std::deque<std::pair<Micros, std::int64_t>> acked_;
  std::int64_t acked_total_ = 0;
  std::int64_t acked_base_ = 0;
  Micros first_ack_{0};
  Micros last_probe_{0};
  Micros last_backoff_{std::numeric_limits<Micros::rep>::min() / 2};
};

}  // namespace

std::vector<PacketRecord> run_uplink_source(LinkSimulator& link, const TransportParams& params,
                                            Micros horizon) {
  if (horizon.count() <= 0) throw std::invalid_argument("horizon must be positive");
  if (params.ul_pkt_bits <= 0) throw std::invalid_argument("packet size must be positive");

  AimdSender cc(params);
  std::priority_queue<Feedback, std::vector<Feedback>, FeedbackLater> feedback;
  std::vector<PacketRecord> records;
  const Micros ack_delay = 2 * params.d_core + params.cc.ack_extra;

  std::int64_t next_id = 0;
  Micros next_send{0};
  bool paused = false;

  auto collect = [&](std::vector<LinkEvent> events) {
    for (auto& ev : events) {
      const auto& r = ev.record;
      const Micros t = r.delivered() ? *r.t_delivered + ack_delay : ev.t_done + params.cc.ack_extra;
      feedback.push({t, r.id, r.size_bits, r.t_sent, r.delivered()});
      records.push_back(std::move(ev.record));
    }
  };

  while (true) {
    const Micros t_send = (!paused && next_send < horizon) ? next_send : kNever;
    // Feedback after the horizon no longer affects anything.
    const Micros t_fb = (!feedback.empty() && feedback.top().t < horizon) ? feedback.top().t : kNever;
    const Micros t_link = link.next_decision_time().value_or(kNever);
    if (t_send == kNever && t_fb == kNever && t_link == kNever) break;

    if (t_fb <= t_send && t_fb <= t_link) {
      const Feedback f = feedback.top();
      feedback.pop();
      cc.on_feedback(f);
      if (paused && cc.inflight() + params.ul_pkt_bits <= cc.window_bits()) {
        paused = false;
        next_send = std::max(next_send, f.t);
      }
    } else if (t_send <= t_link) {
      cc.update(t_send);
      if (cc.inflight() + params.ul_pkt_bits > cc.window_bits()) {
        paused = true;
        continue;
      }
      link.submit(next_id++, t_send, params.ul_pkt_bits);
      cc.on_send(params.ul_pkt_bits);
      // Whole-microsecond spacing rounded up keeps the offered rate <= cap.
      const double gap = static_cast<double>(params.ul_pkt_bits) * 1e6 / cc.rate();
      next_send = t_send + Micros{static_cast<Micros::rep>(std::ceil(gap - 1e-9))};
    } else {
      collect(link.step());
    }
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return records;
}

std::vector<OfferedPacket> downlink_schedule(const TransportParams& params, Micros horizon) {
  if (horizon.count() <= 0) throw std::invalid_argument("horizon must be positive");
  const auto n = static_cast<std::int64_t>(std::floor(to_seconds(horizon) * params.dl_pkts_per_s + 1e-9));
  std::vector<OfferedPacket> out;
  out.reserve(static_cast<std::size_t>(n));
  const auto bits = params.dl_pkt_bits();
  for (std::int64_t k = 0; k < n; ++k) {
    out.push_back({k, from_seconds(static_cast<double>(k) / params.dl_pkts_per_s), bits});
  }
  return out;
}

std::vector<PacketRecord> run_downlink_feedback(LinkSimulator& link, const TransportParams& params,
                                                Micros horizon) {
  for (const auto& p : downlink_schedule(params, horizon)) link.submit(p.id, p.t, p.size_bits);
  std::vector<PacketRecord> out;
  for (auto& ev : link.run_to_completion()) out.push_back(std::move(ev.record));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::vector<PacketRecord> add_core_delay(std::vector<PacketRecord> records, Micros d_core) {
  for (auto& r : records) {
    if (r.t_delivered) *r.t_delivered += d_core;
  }
  return records;
}

}  // namespace mecsim
