#include "mecsim/pipeline.hpp"

#include "mecsim/rng.hpp"
#include "mecsim/transport.hpp"

namespace mecsim {

double downlink_sinr_offset_db(const TechConfig& tech) {
  return (tech.bs_tx_power_dbm - tech.ue_tx_power_dbm) + (tech.ul_noise_figure_db - tech.dl_noise_figure_db);
}

LinkRun run_link(const ChannelTrace& trace, const ScenarioConfig& cfg, TechKind tech) {
  const TechConfig& tc = cfg.tech(tech);
  const auto ul_params = LinkParams::from(tc, Direction::UL);
  const auto dl_params = LinkParams::from(tc, Direction::DL);
  const auto k = static_cast<std::uint64_t>(tech);

  LinkRun run;
  run.tech = tech;
  run.horizon = trace.horizon;

  LinkSimulator ul(LinkSeries::from_trace(trace, tech, ul_params), ul_params, derive_seed(cfg.seed, {3, k, 0}));
  run.ul = add_core_delay(run_uplink_source(ul, cfg.traffic, trace.horizon), cfg.traffic.d_core);

  LinkSimulator dl(LinkSeries::from_trace(trace, tech, dl_params, downlink_sinr_offset_db(tc)), dl_params,
                   derive_seed(cfg.seed, {3, k, 1}));
  run.dl = add_core_delay(run_downlink_feedback(dl, cfg.traffic, trace.horizon), cfg.traffic.d_core);
  return run;
}

}  // namespace mecsim
