#include "mecsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <set>

#include <fmt/format.h>

#include "mecsim/channel.hpp"
#include "mecsim/config.hpp"
#include "mecsim/csv.hpp"
#include "mecsim/io.hpp"
#include "mecsim/pipeline.hpp"

namespace mecsim {

namespace fs = std::filesystem;

namespace {

std::string num_label(double v) { return fmt::format("{}", v); }

Json json_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json heatmap_json(const HeatmapMatrix& m) {
  std::vector<double> required;
  for (std::size_t n = 1; n <= m.camera_rates_mbps.size(); ++n) required.push_back(m.required_mbps(n));
  return {{"d_max_ms", m.d_max_ms},
          {"camera_rates_mbps", m.camera_rates_mbps},
          {"required_mbps", required},
          {"cells", m.cells}};
}

HeatmapMatrix heatmap_from_json(const Json& j) {
  HeatmapMatrix m;
  m.d_max_ms = j.at("d_max_ms").get<std::vector<double>>();
  m.camera_rates_mbps = j.at("camera_rates_mbps").get<std::vector<double>>();
  m.cells = j.at("cells").get<std::vector<std::vector<double>>>();
  return m;
}

Json sample_stats(const std::vector<double>& v) {
  Json j{{"count", v.size()}};
  if (v.empty()) {
    j["median"] = nullptr;
    j["min"] = nullptr;
    j["p90"] = nullptr;
    return j;
  }
  const auto cdf = empirical_cdf(v);
  j["median"] = quantile(cdf, 0.5);
  j["min"] = cdf.front().value;
  j["p90"] = quantile(cdf, 0.9);
  return j;
}

std::vector<double> mbps(const RateSeries& s) {
  std::vector<double> out;
  out.reserve(s.bps.size());
  for (double v : s.bps) out.push_back(v / kBitsPerMbit);
  return out;
}

// Delay-constrained series per d_max, computed on first use.
class SeriesCache {
 public:
  SeriesCache(const LinkLogs& logs, const FrameGrid& grid, Micros horizon)
      : logs_(logs), grid_(grid), horizon_(horizon) {}

  const RateSeries& at(double d_max_ms) {
    auto it = cache_.find(d_max_ms);
    if (it == cache_.end()) {
      it = cache_.emplace(d_max_ms, delay_constrained_throughput(logs_.ul, logs_.dl, grid_, d_max_ms, horizon_))
               .first;
    }
    return it->second;
  }

 private:
  const LinkLogs& logs_;
  FrameGrid grid_;
  Micros horizon_;
  std::map<double, RateSeries> cache_;
};

// Per interval, the RTT samples of whichever link delivered more.
std::vector<double> combined_rtt(const LinkLogs& mmwave, const LinkLogs& lte, const FrameGrid& grid,
                                 Micros horizon) {
  const auto t_mmw = delivered_throughput(mmwave.ul, grid, horizon);
  const auto t_lte = delivered_throughput(lte.ul, grid, horizon);
  std::vector<double> out;
  auto add = [&](const LinkLogs& logs, bool is_lte) {
    const RttPairing pairing(logs.dl, grid);
    for (const auto& r : logs.ul) {
      if (!r.delivered()) continue;
      const auto k = grid.index_of(r.t_sent);
      if (k < 0 || k >= static_cast<std::int64_t>(t_mmw.bps.size())) continue;
      const auto i = static_cast<std::size_t>(k);
      if ((t_lte.bps[i] > t_mmw.bps[i]) != is_lte) continue;
      const auto fb = pairing.feedback_delay(r.t_sent);
      if (!fb || *fb == RttPairing::kLost) continue;
      out.push_back(to_ms(*r.delay() + *fb));
    }
  };
  add(mmwave, false);
  add(lte, true);
  return out;
}

Json local_row(Resolution r, const SummaryParams& p, const RateAccuracyCurve& curve) {
  const double delay = total_delay(Site::LOCAL, r, 0.0);
  const auto acc = curve.plateau(r);
  Json avail = Json::object();
  for (double t : p.targets_ms) avail[num_label(t)] = delay <= t ? 1.0 : 0.0;
  return {{"name", fmt::format("local_{}", to_string(r))},
          {"site", "local"},
          {"resolution", to_string(r)},
          {"cameras", 1},
          {"rates_mbps", {0.0}},
          {"median_rtt_ms", 0.0},
          {"median_total_delay_ms", delay},
          {"availability", avail},
          {"wmap", acc.wmap},
          {"ap_person", acc.ap_person},
          {"range_m", detection_range(r)}};
}

Json edge_row(const std::string& name, const std::vector<double>& rates, const std::vector<double>& rtt_samples,
              SeriesCache& series, const SummaryParams& p, const RateAccuracyCurve& curve) {
  const auto r = Resolution::R1080P;
  const auto acc = curve.at(r, rates.front());
  Json j{{"name", name},
         {"site", "edge"},
         {"resolution", to_string(r)},
         {"cameras", rates.size()},
         {"rates_mbps", rates},
         {"wmap", acc.wmap},
         {"ap_person", acc.ap_person},
         {"range_m", detection_range(r)}};
  double required = 0.0;
  for (double x : rates) required += x;
  if (rtt_samples.empty()) {
    j["median_rtt_ms"] = nullptr;
    j["median_total_delay_ms"] = nullptr;
  } else {
    const double rtt = median(rtt_samples);
    j["median_rtt_ms"] = rtt;
    j["median_total_delay_ms"] = total_delay(Site::EDGE, r, rtt);
  }
  Json avail = Json::object();
  for (double t : p.targets_ms) {
    avail[num_label(t)] = availability(series.at(rtt_budget(t, r)), required * kBitsPerMbit);
  }
  j["availability"] = avail;
  return j;
}

}  // namespace

Json SummaryParams::to_json() const {
  return {{"frame_hz", frame_hz},
          {"horizon_us", horizon.count()},
          {"d_max_ms", dmax_ms},
          {"targets_ms", targets_ms},
          {"strategy", to_string(policy.strategy)},
          {"edge_rtt_ms", policy.edge_rtt_ms}};
}

SummaryParams SummaryParams::from_json(const Json& j) {
  SummaryParams p;
  p.frame_hz = j.at("frame_hz").get<double>();
  p.horizon = Micros{j.at("horizon_us").get<std::int64_t>()};
  p.dmax_ms = j.at("d_max_ms").get<std::vector<double>>();
  p.targets_ms = j.at("targets_ms").get<std::vector<double>>();
  p.policy.strategy = parse_strategy(j.at("strategy").get<std::string>());
  p.policy.edge_rtt_ms = j.at("edge_rtt_ms").get<double>();
  p.policy.total_targets_ms = p.targets_ms;
  return p;
}

const std::vector<double>& camera_rates(CameraStrategy s) {
  return s == CameraStrategy::UNIFORM ? kUniformCameraRates : kPriorityCameraRates;
}

std::vector<double> dmax_list(const PolicyParams& policy) {
  std::set<double> s(policy.dmax_grid_ms.begin(), policy.dmax_grid_ms.end());
  for (double t : policy.total_targets_ms) s.insert(rtt_budget(t, Resolution::R1080P));
  return {s.begin(), s.end()};
}

Json summarize(const LinkLogs& lte, const LinkLogs& mmwave, const SummaryParams& p) {
  const auto grid = FrameGrid::from_hz(p.frame_hz);
  const auto curve = RateAccuracyCurve::builtin();
  SeriesCache s_lte(lte, grid, p.horizon);
  SeriesCache s_mmw(mmwave, grid, p.horizon);
  std::map<double, RateSeries> s_comb;
  for (double d : p.dmax_ms) s_comb.emplace(d, max_fallback(s_lte.at(d), s_mmw.at(d)));
  for (double t : p.targets_ms) {
    const double d = rtt_budget(t, Resolution::R1080P);
    if (!s_comb.count(d)) s_comb.emplace(d, max_fallback(s_lte.at(d), s_mmw.at(d)));
  }

  Json heatmaps = Json::object();
  for (auto strategy : {CameraStrategy::UNIFORM, CameraStrategy::PRIORITY}) {
    const auto& rates = camera_rates(strategy);
    std::vector<RateSeries> rows_lte, rows_mmw, rows_comb;
    for (double d : p.dmax_ms) {
      rows_lte.push_back(s_lte.at(d));
      rows_mmw.push_back(s_mmw.at(d));
      rows_comb.push_back(s_comb.at(d));
    }
    const auto label = std::string(to_string(strategy));
    heatmaps["lte_" + label] = heatmap_json(camera_support_matrix(rows_lte, rates));
    heatmaps["mmwave_" + label] = heatmap_json(camera_support_matrix(rows_mmw, rates));
    heatmaps["mmwave_lte_" + label] = heatmap_json(camera_support_matrix(rows_comb, rates));
  }

  const auto rtt_lte = rtt_per_frame(lte.ul, lte.dl, grid);
  const auto rtt_mmw = rtt_per_frame(mmwave.ul, mmwave.dl, grid);
  const auto rtt_comb = combined_rtt(mmwave, lte, grid, p.horizon);
  auto rtt_json = [](const RttSamples& r) {
    Json j = sample_stats(r.rtt_ms);
    j["unpaired"] = r.unpaired;
    j["feedback_lost"] = r.feedback_lost;
    return j;
  };
  Json rtt{{"lte", rtt_json(rtt_lte)}, {"mmwave", rtt_json(rtt_mmw)}, {"mmwave_lte", sample_stats(rtt_comb)}};

  const auto thr_lte = delivered_throughput(lte.ul, grid, p.horizon);
  const auto thr_mmw = delivered_throughput(mmwave.ul, grid, p.horizon);
  const auto thr_comb = max_fallback(thr_lte, thr_mmw);
  Json throughput{{"lte", sample_stats(mbps(thr_lte))},
                  {"mmwave", sample_stats(mbps(thr_mmw))},
                  {"mmwave_lte", sample_stats(mbps(thr_comb))}};

  Json rows = Json::array();
  rows.push_back(local_row(Resolution::WVGA, p, curve));
  rows.push_back(local_row(Resolution::R720P, p, curve));
  rows.push_back(edge_row("lte_edge", {kCameraFullRateMbps}, rtt_lte.rtt_ms, s_lte, p, curve));
  {
    // The mmWave row is served by mmWave with LTE fallback.
    Json j = edge_row("mmwave_lte_edge", camera_rates(p.policy.strategy), rtt_mmw.rtt_ms, s_mmw, p, curve);
    double required = 0.0;
    for (double x : camera_rates(p.policy.strategy)) required += x;
    for (double t : p.targets_ms) {
      j["availability"][num_label(t)] =
          availability(s_comb.at(rtt_budget(t, Resolution::R1080P)), required * kBitsPerMbit);
    }
    rows.push_back(j);
  }

  Json adaptive = Json::object();
  for (double t : p.targets_ms) {
    const auto& series = s_comb.at(rtt_budget(t, Resolution::R1080P));
    adaptive[num_label(t)] = to_json(policy_eval(series, t, p.policy.strategy, p.policy), t, p.policy.strategy);
  }

  return {{"intervals", grid.count(p.horizon)},
          {"packets", {{"lte_ul", lte.ul.size()}, {"lte_dl", lte.dl.size()},
                       {"mmwave_ul", mmwave.ul.size()}, {"mmwave_dl", mmwave.dl.size()}}},
          {"rows", rows},
          {"heatmaps", heatmaps},
          {"rtt_ms", rtt},
          {"throughput_mbps", throughput},
          {"adaptive", adaptive}};
}

RunResult run_scenario(const ScenarioConfig& cfg, const std::string& config_hash, const fs::path& out_dir,
                       bool svg) {
  if (auto v = validate_config(cfg); !v.empty()) throw ConfigError(std::move(v));
  for (const char* sub : {"", "packets", "rates", "heatmaps", "cdf", "policy"}) {
    std::error_code ec;
    fs::create_directories(out_dir / sub, ec);
    if (ec) throw std::runtime_error(fmt::format("cannot create '{}': {}", (out_dir / sub).string(), ec.message()));
  }

  RunResult res;
  // Records each emitted file in the manifest.
  auto path = [&](const std::string& rel) {
    res.files.push_back(rel);
    return out_dir / rel;
  };
  const auto trace = synthesize_trace(cfg);
  export_trace(trace, path("channel_trace.csv"));

  auto f_lte = std::async(std::launch::async, [&] { return run_link(trace, cfg, TechKind::LTE); });
  auto f_mmw = std::async(std::launch::async, [&] { return run_link(trace, cfg, TechKind::MMWAVE); });
  const auto r_lte = f_lte.get();
  const auto r_mmw = f_mmw.get();
  const LinkLogs lte{r_lte.ul, r_lte.dl};
  const LinkLogs mmw{r_mmw.ul, r_mmw.dl};

  write_packet_log(lte.ul, path("packets/lte_ul.csv"));
  write_packet_log(lte.dl, path("packets/lte_dl.csv"));
  write_packet_log(mmw.ul, path("packets/mmwave_ul.csv"));
  write_packet_log(mmw.dl, path("packets/mmwave_dl.csv"));

  SummaryParams params;
  params.frame_hz = cfg.frame_hz;
  params.horizon = trace.horizon;
  params.dmax_ms = dmax_list(cfg.policy);
  params.targets_ms = cfg.policy.total_targets_ms;
  params.policy = cfg.policy;
  const Json summary = summarize(lte, mmw, params);

  const auto grid = FrameGrid::from_hz(cfg.frame_hz);
  for (double d : params.dmax_ms) {
    const auto a = delay_constrained_throughput(lte.ul, lte.dl, grid, d, trace.horizon);
    const auto b = delay_constrained_throughput(mmw.ul, mmw.dl, grid, d, trace.horizon);
    write_rate_series(a, path(fmt::format("rates/lte_dmax{}.csv", d)));
    write_rate_series(b, path(fmt::format("rates/mmwave_dmax{}.csv", d)));
    write_rate_series(max_fallback(a, b), path(fmt::format("rates/mmwave_lte_dmax{}.csv", d)));
  }

  for (const auto& [name, hm] : summary.at("heatmaps").items()) {
    const auto m = heatmap_from_json(hm);
    write_heatmap(m, path(fmt::format("heatmaps/{}.csv", name)));
    if (svg) write_heatmap_svg(m, path(fmt::format("heatmaps/{}.svg", name)));
  }

  const auto rtt_lte = rtt_per_frame(lte.ul, lte.dl, grid).rtt_ms;
  const auto rtt_mmw = rtt_per_frame(mmw.ul, mmw.dl, grid).rtt_ms;
  const auto rtt_comb = combined_rtt(mmw, lte, grid, trace.horizon);
  for (const auto& [name, v] : {std::pair{"lte", &rtt_lte}, {"mmwave", &rtt_mmw}, {"mmwave_lte", &rtt_comb}}) {
    if (!v->empty()) write_cdf(empirical_cdf(*v), path(fmt::format("cdf/rtt_{}.csv", name)));
  }
  const auto thr_lte = mbps(delivered_throughput(lte.ul, grid, trace.horizon));
  const auto thr_mmw = mbps(delivered_throughput(mmw.ul, grid, trace.horizon));
  std::vector<double> thr_comb(thr_lte.size());
  for (std::size_t i = 0; i < thr_comb.size(); ++i) thr_comb[i] = std::max(thr_lte[i], thr_mmw[i]);
  for (const auto& [name, v] : {std::pair{"lte", &thr_lte}, {"mmwave", &thr_mmw}, {"mmwave_lte", &thr_comb}}) {
    if (!v->empty()) write_cdf(empirical_cdf(*v), path(fmt::format("cdf/throughput_{}.csv", name)));
  }

  for (double t : params.targets_ms) {
    const double d = rtt_budget(t, Resolution::R1080P);
    const auto series = max_fallback(delay_constrained_throughput(lte.ul, lte.dl, grid, d, trace.horizon),
                                     delay_constrained_throughput(mmw.ul, mmw.dl, grid, d, trace.horizon));
    const auto r = policy_eval(series, t, cfg.policy.strategy, cfg.policy);
    write_timeline(r, mbps(series), grid, path(fmt::format("policy/timeline_{}ms.csv", t)));
  }

  std::sort(res.files.begin(), res.files.end());
  res.report = Json{{"seed", cfg.seed},
                    {"config_hash", config_hash},
                    {"route_hash", trace.route_hash},
                    {"parameters", params.to_json()},
                    {"summary", summary},
                    {"files", res.files}};
  auto out = csv::open_out(out_dir / "report.json");
  out << res.report.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: report.json");
  res.files.push_back("report.json");
  return res;
}

std::vector<std::string> audit_report(const fs::path& out_dir) {
  std::ifstream in(out_dir / "report.json");
  if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", (out_dir / "report.json").string()));
  const Json report = Json::parse(in);
  const auto params = SummaryParams::from_json(report.at("parameters"));

  std::vector<std::string> problems;
  const LinkLogs lte{read_packet_log(out_dir / "packets/lte_ul.csv"), read_packet_log(out_dir / "packets/lte_dl.csv")};
  const LinkLogs mmw{read_packet_log(out_dir / "packets/mmwave_ul.csv"),
                     read_packet_log(out_dir / "packets/mmwave_dl.csv")};
  const Json recomputed = summarize(lte, mmw, params);
  for (const auto& op : Json::diff(report.at("summary"), recomputed)) {
    problems.push_back(fmt::format("summary{} differs", op.at("path").get<std::string>()));
  }

  for (const auto& [name, hm] : report.at("summary").at("heatmaps").items()) {
    const auto file = out_dir / "heatmaps" / (name + ".csv");
    if (!fs::exists(file)) {
      problems.push_back(fmt::format("{} missing", file.generic_string()));
      continue;
    }
    const auto m = read_heatmap(file);
    const auto expect = heatmap_from_json(hm);
    if (m.cells != expect.cells || m.d_max_ms != expect.d_max_ms || m.camera_rates_mbps != expect.camera_rates_mbps) {
      problems.push_back(fmt::format("{} does not match the report", file.generic_string()));
    }
  }
  for (const auto& f : report.at("files")) {
    if (!fs::exists(out_dir / f.get<std::string>())) problems.push_back(fmt::format("{} missing", f.get<std::string>()));
  }
  return problems;
}

AnalyzeResult analyze_logs(const fs::path& ul_log, const fs::path& dl_log, std::span<const double> dmax_ms,
                           std::span<const double> camera_rates_mbps, double frame_hz, const fs::path& out_dir,
                           bool svg) {
  AnalyzeResult res;
  const auto ul = read_packet_log(ul_log);
  const auto dl = read_packet_log(dl_log);
  if (ul.empty()) res.warnings.push_back(fmt::format("{}: no packets", ul_log.string()));
  if (dl.empty()) res.warnings.push_back(fmt::format("{}: no packets", dl_log.string()));
  for (const auto& r : ul) {
    if (r.dir != Direction::UL) {
      res.warnings.push_back(fmt::format("{}: contains downlink packets", ul_log.string()));
      break;
    }
  }

  std::error_code ec;
  fs::create_directories(out_dir / "rates", ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));

  const auto grid = FrameGrid::from_hz(frame_hz);
  const Micros h = log_horizon(ul, dl);
  std::vector<RateSeries> series;
  Json per_d = Json::array();
  for (double d : dmax_ms) {
    series.push_back(delay_constrained_throughput(ul, dl, grid, d, h));
    const auto rel = fmt::format("rates/dmax{}.csv", d);
    write_rate_series(series.back(), out_dir / rel);
    res.files.push_back(rel);
    const auto m = mbps(series.back());
    double mean = 0.0;
    for (double v : m) mean += v;
    per_d.push_back({{"d_max_ms", d},
                     {"mean_mbps", m.empty() ? 0.0 : mean / static_cast<double>(m.size())},
                     {"median_mbps", m.empty() ? 0.0 : median(m)}});
  }
  const auto heat = camera_support_matrix(series, camera_rates_mbps);
  write_heatmap(heat, out_dir / "heatmap.csv");
  res.files.push_back("heatmap.csv");
  if (svg) {
    write_heatmap_svg(heat, out_dir / "heatmap.svg");
    res.files.push_back("heatmap.svg");
  }
  const auto rtt = rtt_per_frame(ul, dl, grid);
  if (!rtt.rtt_ms.empty()) {
    write_cdf(empirical_cdf(rtt.rtt_ms), out_dir / "rtt_cdf.csv");
    res.files.push_back("rtt_cdf.csv");
  } else {
    res.warnings.push_back("no round trips to build an RTT CDF from");
  }
  Json rtt_j = sample_stats(rtt.rtt_ms);
  rtt_j["unpaired"] = rtt.unpaired;
  rtt_j["feedback_lost"] = rtt.feedback_lost;

  res.summary = Json{{"horizon_us", h.count()},
                     {"intervals", grid.count(h)},
                     {"packets", {{"ul", ul.size()}, {"dl", dl.size()}}},
                     {"throughput", per_d},
                     {"heatmap", heatmap_json(heat)},
                     {"rtt_ms", rtt_j}};
  auto out = csv::open_out(out_dir / "summary.json");
  out << res.summary.dump(2) << '\n';
  res.files.push_back("summary.json");
  return res;
}

PolicyEvalResult policy_eval(std::span<const double> throughput_mbps, double target_ms, CameraStrategy strategy,
                             const PolicyParams& policy) {
  PolicyEvalResult r;
  r.bands = policy_bands(target_ms);
  r.band_fractions.assign(r.bands.size(), 0.0);
  std::vector<std::int64_t> counts(r.bands.size(), 0);
  for (double v : throughput_mbps) {
    r.timeline.push_back(decide(v, target_ms, strategy, policy));
    for (std::size_t b = 0; b < r.bands.size(); ++b) {
      if (v >= r.bands[b].lo_mbps && v < r.bands[b].hi_mbps) {
        ++counts[b];
        break;
      }
    }
  }
  if (throughput_mbps.empty()) return r;
  const auto n = static_cast<double>(throughput_mbps.size());
  std::vector<double> p, wmap, ap;
  for (std::size_t b = 0; b < r.bands.size(); ++b) {
    r.band_fractions[b] = static_cast<double>(counts[b]) / n;
    if (!r.bands[b].compliant) continue;
    r.availability += r.band_fractions[b];
    p.push_back(r.band_fractions[b]);
    wmap.push_back(r.bands[b].acc.wmap);
    ap.push_back(r.bands[b].acc.ap_person);
  }
  if (r.availability > 0) r.expected = Accuracy{expected_performance(p, wmap), expected_performance(p, ap)};
  return r;
}

PolicyEvalResult policy_eval(const RateSeries& series, double target_ms, CameraStrategy strategy,
                             const PolicyParams& policy) {
  return policy_eval(mbps(series), target_ms, strategy, policy);
}

Json to_json(const PolicyEvalResult& r, double target_ms, CameraStrategy strategy) {
  Json bands = Json::array();
  for (std::size_t b = 0; b < r.bands.size(); ++b) {
    const auto& band = r.bands[b];
    bands.push_back({{"label", band.label},
                     {"lo_mbps", band.lo_mbps},
                     {"hi_mbps", json_or_null(band.hi_mbps)},
                     {"site", to_string(band.site)},
                     {"fraction", r.band_fractions[b]},
                     {"wmap", band.acc.wmap},
                     {"ap_person", band.acc.ap_person},
                     {"compliant", band.compliant}});
  }
  std::size_t edge = 0, compliant = 0, cameras = 0;
  for (const auto& d : r.timeline) {
    edge += d.site == Site::EDGE;
    compliant += d.compliant;
    cameras += static_cast<std::size_t>(d.n_cameras);
  }
  const double n = r.timeline.empty() ? 1.0 : static_cast<double>(r.timeline.size());
  return {{"target_ms", target_ms},
          {"strategy", to_string(strategy)},
          {"bands", bands},
          {"availability", r.availability},
          {"expected_wmap", r.expected ? Json(r.expected->wmap) : Json(nullptr)},
          {"expected_ap_person", r.expected ? Json(r.expected->ap_person) : Json(nullptr)},
          {"decisions",
           {{"intervals", r.timeline.size()},
            {"edge_fraction", static_cast<double>(edge) / n},
            {"compliant_fraction", static_cast<double>(compliant) / n},
            {"mean_cameras", static_cast<double>(cameras) / n}}}};
}

void write_timeline(const PolicyEvalResult& r, std::span<const double> throughput_mbps, const FrameGrid& grid,
                    const fs::path& path) {
  auto out = csv::open_out(path);
  out << "interval,t_start_s,throughput_mbps,site,resolution,n_cameras,rates_mbps,wmap,ap_person,range_m,"
         "total_delay_ms,compliant\n";
  for (std::size_t k = 0; k < r.timeline.size(); ++k) {
    const auto& d = r.timeline[k];
    std::string rates;
    for (std::size_t i = 0; i < d.rates_mbps.size(); ++i) rates += fmt::format("{}{}", i ? ";" : "", d.rates_mbps[i]);
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", k,
                       csv::format_seconds(grid.start(static_cast<std::int64_t>(k))), throughput_mbps[k],
                       to_string(d.site), to_string(d.resolution), d.n_cameras, rates, d.expected.wmap,
                       d.expected.ap_person, d.range_m, d.total_delay_ms, d.compliant ? 1 : 0);
  }
  if (!out) throw std::runtime_error(fmt::format("write failed: '{}'", path.string()));
}

}  // namespace mecsim
