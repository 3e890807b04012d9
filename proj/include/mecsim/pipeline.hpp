#pragma once

// One technology end to end: channel trace -> serving-link capacity -> closed
// loop uplink and downlink feedback -> packet logs at the edge server.

#include <vector>

#include "mecsim/airlink.hpp"
#include "mecsim/channel.hpp"
#include "mecsim/model.hpp"

namespace mecsim {

struct LinkRun {
  TechKind tech = TechKind::LTE;
  /// Delays include the core network in both directions.
  std::vector<PacketRecord> ul;
  std::vector<PacketRecord> dl;
  Micros horizon{0};
};

/// Downlink SINR relative to the uplink SINR of the same ray set: the power
/// and noise-figure differences between base station and UE.
double downlink_sinr_offset_db(const TechConfig& tech);

LinkRun run_link(const ChannelTrace& trace, const ScenarioConfig& cfg, TechKind tech);

}  // namespace mecsim
