#pragma once

// Application traffic: the rate-adaptive uplink video proxy and the
// constant-bit-rate downlink feedback, plus core-network delay.

#include <vector>

#include "mecsim/airlink.hpp"
#include "mecsim/model.hpp"

namespace mecsim {

/// Closed-loop uplink source. The sender keeps a send rate that grows by
/// `probe_step_bps` every smoothed RTT and backs off multiplicatively when the
/// bits in flight exceed the pipe (delivery rate x min RTT) by more than one
/// bandwidth-delay product, or when a packet is dropped. The rate is clamped
/// to [min_rate, ul_cap]. Returned records carry airlink delays only.
std::vector<PacketRecord> run_uplink_source(LinkSimulator& link, const TransportParams& params,
                                            Micros horizon);

/// floor(horizon x dl_pkts_per_s) packets of dl_rate / dl_pkts_per_s bits each,
/// uniformly spaced from t = 0.
std::vector<OfferedPacket> downlink_schedule(const TransportParams& params, Micros horizon);
std::vector<PacketRecord> run_downlink_feedback(LinkSimulator& link, const TransportParams& params,
                                                Micros horizon);

/// Adds the one-way base-station-to-server delay to every delivered packet.
std::vector<PacketRecord> add_core_delay(std::vector<PacketRecord> records, Micros d_core);

}  // namespace mecsim
