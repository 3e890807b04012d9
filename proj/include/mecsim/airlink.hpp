#pragma once

// Air-interface service model: SINR to rate, HARQ error process, slot
// alignment, and an event-driven FIFO link fed by a piecewise-constant
// capacity series.

#include <deque>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "mecsim/channel.hpp"
#include "mecsim/model.hpp"

namespace mecsim {

struct LinkParams {
  Technology tech;
  Direction dir = Direction::UL;
  double se_cap_bps_hz = 3.6;
  double min_sinr_db = -5.0;
  double ul_share = 1.0;
  Micros harq_rtx_delay{8000};
  /// Maximum transmission attempts per packet.
  int max_rtx = 4;
  BlerModel bler;
  Micros processing{0};

  /// Fraction of the UE bandwidth usable in this direction.
  double share() const;

  static LinkParams from(const TechConfig& cfg, Direction dir);
};

double sinr_to_rate(double sinr_db, const LinkParams& params);
double packet_error_prob(double sinr_db, const BlerModel& bler);
Micros frame_alignment_delay(Micros t_arrival, const Technology& tech);

struct LinkId {
  int bs_id = 0;
  TechKind tech = TechKind::LTE;
  friend bool operator==(const LinkId&, const LinkId&) = default;
};

struct PacketRecord {
  std::int64_t id = 0;
  Direction dir = Direction::UL;
  std::int64_t size_bits = 0;
  Micros t_sent{0};
  /// nullopt when the packet was dropped.
  std::optional<Micros> t_delivered;
  LinkId link;
  int n_transmissions = 1;

  bool delivered() const { return t_delivered.has_value(); }
  std::optional<Micros> delay() const {
    if (!t_delivered) return std::nullopt;
    return *t_delivered - t_sent;
  }
  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

/// Piecewise-constant capacity of the serving link. Before the first change
/// point the first value applies; after the last one the last value holds.
class LinkSeries {
 public:
  struct Segment {
    Micros t{0};
    double rate_bps = 0.0;
    std::optional<double> sinr_db;
    int bs_id = 0;
  };

  LinkSeries(std::vector<Segment> segments, TechKind tech, Micros horizon);

  /// Serving-cell series for one technology: at each instant the BS with the
  /// highest SINR (or rate, for rate traces) serves. `sinr_offset_db` shifts
  /// the uplink SINR to the direction being simulated.
  static LinkSeries from_trace(const ChannelTrace& trace, TechKind tech, const LinkParams& params,
                               double sinr_offset_db = 0.0);
  static LinkSeries constant(double rate_bps, Micros horizon, TechKind tech,
                             std::optional<double> sinr_db = std::nullopt, int bs_id = 0);

  const Segment& at(Micros t) const;
  /// Completion time of `bits` of service starting at `start`; nullopt when
  /// the capacity stays zero forever.
  std::optional<Micros> finish_time(Micros start, double bits) const;
  /// Integral of the rate over [a, b), in bits.
  double capacity_bits(Micros a, Micros b) const;
  double max_rate() const;
  Micros horizon() const { return horizon_; }
  TechKind tech() const { return tech_; }
  std::span<const Segment> segments() const { return segments_; }

 private:
  std::size_t index_at(Micros t) const;

  std::vector<Segment> segments_;
  TechKind tech_;
  Micros horizon_;
};

/// Finalized outcome of one packet plus the time the outcome became known at
/// the transmitter (delivery or final HARQ failure).
struct LinkEvent {
  PacketRecord record;
  Micros t_done{0};
};

/// Event-driven FIFO link with HARQ. Retransmissions take priority over new
/// packets; at most `n_harq` packets may wait for retransmission, after which
/// new packets are held back. Packets must be submitted in nondecreasing
/// arrival order and no earlier than the last service decision.
class LinkSimulator {
 public:
  LinkSimulator(LinkSeries series, LinkParams params, std::uint64_t seed);

  void submit(std::int64_t id, Micros arrival, std::int64_t size_bits);
  /// Time of the next service decision given the packets submitted so far.
  std::optional<Micros> next_decision_time() const;
  /// Executes one service decision; returns packets whose fate is now final.
  std::vector<LinkEvent> step();
  std::vector<LinkEvent> run_to_completion();

  const LinkSeries& series() const { return series_; }
  const LinkParams& params() const { return params_; }

 private:
  struct Pending {
    std::int64_t id;
    Micros arrival;
    std::int64_t size_bits;
    int attempts = 0;
    Micros ready{0};
    int bs_id = 0;
  };
  struct ReadyLater {
    bool operator()(const Pending& a, const Pending& b) const {
      return a.ready != b.ready ? a.ready > b.ready : a.id > b.id;
    }
  };

  LinkSeries series_;
  LinkParams params_;
  std::uint64_t seed_;
  std::deque<Pending> fresh_;
  std::priority_queue<Pending, std::vector<Pending>, ReadyLater> retx_;
  Micros server_free_{0};
  Micros last_decision_{std::numeric_limits<Micros::rep>::min()};
};

struct OfferedPacket {
  std::int64_t id = 0;
  Micros t{0};
  std::int64_t size_bits = 0;
};

/// Open-loop simulation of an offered packet stream; records sorted by id.
std::vector<PacketRecord> simulate_link(const LinkSeries& series, std::span<const OfferedPacket> offered,
                                        const LinkParams& params, std::uint64_t seed);
std::vector<PacketRecord> simulate_link(const ChannelTrace& trace, std::span<const OfferedPacket> offered,
                                        const LinkParams& params, std::uint64_t seed);

}  // namespace mecsim
