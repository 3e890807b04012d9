// Command-line front end: simulate a scenario, analyze external packet logs,
// evaluate the offloading policy on a throughput series, or audit a report.
//
// Exit codes: 0 ok, 1 invalid configuration or arguments, 2 runtime failure.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "mecsim/config.hpp"
#include "mecsim/io.hpp"
#include "mecsim/scenario.hpp"

namespace {

using namespace mecsim;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

void print_rows(const Json& summary) {
  fmt::print("{:<18} {:>6} {:>6} {:>9} {:>9} {:>10} {:>8}\n", "config", "res", "cams", "rate", "rtt_ms",
             "total_ms", "wmAP");
  for (const auto& r : summary.at("rows")) {
    double rate = 0.0;
    for (const auto& x : r.at("rates_mbps")) rate += x.get<double>();
    const auto& rtt = r.at("median_rtt_ms");
    const auto& total = r.at("median_total_delay_ms");
    fmt::print("{:<18} {:>6} {:>6} {:>9.1f} {:>9} {:>10} {:>8.2f}\n", r.at("name").get<std::string>(),
               r.at("resolution").get<std::string>(), r.at("cameras").get<int>(), rate,
               rtt.is_null() ? "-" : fmt::format("{:.1f}", rtt.get<double>()),
               total.is_null() ? "-" : fmt::format("{:.1f}", total.get<double>()), r.at("wmap").get<double>());
  }
  for (const auto& [target, a] : summary.at("adaptive").items()) {
    const auto& w = a.at("expected_wmap");
    fmt::print("adaptive @ {} ms: availability {:.3f}, expected wmAP {}\n", target, a.at("availability").get<double>(),
               w.is_null() ? "-" : fmt::format("{:.2f}", w.get<double>()));
  }
}

int run_simulate(const std::optional<std::string>& config, std::optional<std::uint64_t> seed,
                 const std::string& out, const std::vector<double>& dmax, const std::optional<std::string>& strategy,
                 bool svg) {
  ScenarioConfig cfg = ScenarioConfig::defaults();
  std::string hash = "defaults";
  try {
    if (config) {
      cfg = load_config(*config);
      hash = file_hash(*config);
    }
    if (seed) cfg.seed = *seed;
    if (!dmax.empty()) cfg.policy.dmax_grid_ms = dmax;
    if (strategy) cfg.policy.strategy = parse_strategy(*strategy);
    if (auto v = validate_config(cfg); !v.empty()) throw ConfigError(v);
  } catch (const ConfigError& e) {
    for (const auto& v : e.violations()) fmt::print(stderr, "config: {}\n", v);
    return kConfigError;
  } catch (const ParseError& e) {
    fmt::print(stderr, "config: {}\n", e.what());
    return kConfigError;
  }
  const auto result = run_scenario(cfg, hash, out, svg);
  print_rows(result.report.at("summary"));
  fmt::print("wrote {} files to {}\n", result.files.size(), out);
  return kOk;
}

int run_analyze(const std::string& ul, const std::string& dl, std::vector<double> dmax,
                std::vector<double> cameras, const std::optional<std::string>& strategy, double frame_hz,
                const std::string& out, bool svg) {
  if (dmax.empty()) dmax = {30.0, 40.0, 50.0};
  if (cameras.empty()) cameras = camera_rates(strategy ? parse_strategy(*strategy) : CameraStrategy::UNIFORM);
  const auto res = analyze_logs(ul, dl, dmax, cameras, frame_hz, out, svg);
  for (const auto& w : res.warnings) fmt::print(stderr, "warning: {}\n", w);
  std::cout << res.summary.dump(2) << '\n';
  return kOk;
}

int run_policy(const std::string& series_path, double target, const std::string& strategy_name,
               double edge_rtt, const std::optional<std::string>& timeline) {
  const auto series = read_rate_series(series_path);
  const auto strategy = parse_strategy(strategy_name);
  PolicyParams policy;
  policy.strategy = strategy;
  policy.edge_rtt_ms = edge_rtt;
  const auto r = policy_eval(series, target, strategy, policy);
  if (timeline) {
    std::vector<double> mbps;
    for (double v : series.bps) mbps.push_back(v / kBitsPerMbit);
    write_timeline(r, mbps, series.grid, *timeline);
  }
  std::cout << to_json(r, target, strategy).dump(2) << '\n';
  return kOk;
}

int run_report(const std::string& out) {
  const auto problems = audit_report(out);
  for (const auto& p : problems) fmt::print(stderr, "mismatch: {}\n", p);
  if (!problems.empty()) return kRuntimeError;
  fmt::print("report consistent with {}\n", out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wearable video offloading simulator"};
  app.require_subcommand(1);

  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::vector<double> dmax;
  std::optional<std::string> strategy;
  bool svg = true;

  auto* sim = app.add_subcommand("simulate", "Run the bundled or a configured scenario end to end");
  sim->add_option("--config", config, "Scenario INI file (defaults when omitted)")->check(CLI::ExistingFile);
  sim->add_option("--seed", seed, "Override the scenario seed");
  sim->add_option("--out", out, "Output directory");
  sim->add_option("--dmax", dmax, "Round-trip constraints in ms (comma separated)")->delimiter(',');
  const auto strategies = CLI::IsMember({"uniform", "priority"}, CLI::ignore_case);
  sim->add_option("--strategy", strategy, "Camera rate strategy: uniform or priority")->check(strategies);
  sim->add_flag("!--no-svg", svg, "Skip SVG heatmaps");

  std::string ul, dl;
  std::vector<double> cameras;
  double frame_hz = 30.0;
  bool analyze_svg = false;
  auto* ana = app.add_subcommand("analyze", "Metrics from external packet logs");
  ana->add_option("--ul", ul, "Uplink packet log CSV")->required()->check(CLI::ExistingFile);
  ana->add_option("--dl", dl, "Downlink feedback packet log CSV")->required()->check(CLI::ExistingFile);
  ana->add_option("--dmax", dmax, "Round-trip constraints in ms")->delimiter(',');
  ana->add_option("--cameras", cameras, "Per-camera rates in Mbps")->delimiter(',');
  ana->add_option("--strategy", strategy, "Camera rates by strategy when --cameras is absent")->check(strategies);
  ana->add_option("--frame-hz", frame_hz, "Frame rate defining the intervals");
  ana->add_option("--out", out, "Output directory");
  ana->add_flag("--svg", analyze_svg, "Also render the heatmap");

  std::string series;
  double target = 100.0;
  double edge_rtt = 15.0;
  std::string policy_strategy = "uniform";
  std::optional<std::string> timeline;
  auto* pol = app.add_subcommand("policy", "Apply the offloading policy to a throughput series");
  pol->add_option("--series", series, "Rate series CSV (interval,t_start_s,rate_mbps)")->required()->check(CLI::ExistingFile);
  pol->add_option("--target", target, "Total delay target in ms");
  pol->add_option("--strategy", policy_strategy, "uniform or priority")->check(strategies);
  pol->add_option("--edge-rtt", edge_rtt, "RTT in ms assumed for edge decisions");
  pol->add_option("--timeline", timeline, "Write the per-interval decisions to this CSV");

  auto* rep = app.add_subcommand("report", "Check report.json against the emitted CSVs");
  rep->add_option("--out", out, "Directory of a previous simulate run")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sim) return run_simulate(config, seed, out, dmax, strategy, svg);
    if (*ana) return run_analyze(ul, dl, dmax, cameras, strategy, frame_hz, out, analyze_svg);
    if (*pol) return run_policy(series, target, policy_strategy, edge_rtt, timeline);
    if (*rep) return run_report(out);
  } catch (const ConfigError& e) {
    for (const auto& v : e.violations()) fmt::print(stderr, "config: {}\n", v);
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kRuntimeError;
  }
  return kOk;
}
