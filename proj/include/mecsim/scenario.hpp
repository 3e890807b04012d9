#pragma once

// End-to-end runs: synthesize, simulate both technologies, evaluate, and
// write every artifact plus report.json. Also the analysis-only paths used
// for imported packet logs and throughput series.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mecsim/airlink.hpp"
#include "mecsim/analytics.hpp"
#include "mecsim/appmodel.hpp"
#include "mecsim/model.hpp"

namespace mecsim {

using Json = nlohmann::json;

struct LinkLogs {
  std::vector<PacketRecord> ul;
  std::vector<PacketRecord> dl;
};

/// Everything the summary depends on besides the packet logs.
struct SummaryParams {
  double frame_hz = 30.0;
  Micros horizon{0};
  std::vector<double> dmax_ms;
  std::vector<double> targets_ms;
  PolicyParams policy;

  Json to_json() const;
  static SummaryParams from_json(const Json& j);
};

inline const std::vector<double> kUniformCameraRates{26.0, 26.0, 26.0, 26.0};
inline const std::vector<double> kPriorityCameraRates{26.0, 10.0, 10.0, 10.0};
const std::vector<double>& camera_rates(CameraStrategy s);

/// d_max grid plus the RTT budgets of every target at 1080P, sorted.
std::vector<double> dmax_list(const PolicyParams& policy);

/// All report numbers, computed from the LTE and mmWave packet logs only.
Json summarize(const LinkLogs& lte, const LinkLogs& mmwave, const SummaryParams& params);

struct RunResult {
  Json report;
  std::vector<std::string> files;
};

/// Writes the full artifact set under `out_dir`.
RunResult run_scenario(const ScenarioConfig& cfg, const std::string& config_hash,
                       const std::filesystem::path& out_dir, bool svg = true);

/// Re-reads the packet logs and heatmap CSVs listed in `out_dir/report.json`
/// and recomputes the summary. Returns the mismatches (empty when the report
/// is consistent).
std::vector<std::string> audit_report(const std::filesystem::path& out_dir);

struct AnalyzeResult {
  Json summary;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
};

/// Metrics for one externally produced pair of packet logs.
AnalyzeResult analyze_logs(const std::filesystem::path& ul_log, const std::filesystem::path& dl_log,
                           std::span<const double> dmax_ms, std::span<const double> camera_rates_mbps,
                           double frame_hz, const std::filesystem::path& out_dir, bool svg = false);

struct PolicyEvalResult {
  std::vector<PolicyDecision> timeline;
  /// Fraction of intervals per band, in policy_bands order.
  std::vector<double> band_fractions;
  std::vector<PolicyBand> bands;
  /// Fraction of intervals in compliant bands.
  double availability = 0.0;
  /// Band-average accuracy conditioned on availability; nullopt when never
  /// available.
  std::optional<Accuracy> expected;
};

PolicyEvalResult policy_eval(const RateSeries& series, double target_ms, CameraStrategy strategy,
                             const PolicyParams& policy = {});
/// Mbps-input variant for band-occupancy fixtures.
PolicyEvalResult policy_eval(std::span<const double> throughput_mbps, double target_ms, CameraStrategy strategy,
                             const PolicyParams& policy = {});

Json to_json(const PolicyEvalResult& r, double target_ms, CameraStrategy strategy);
void write_timeline(const PolicyEvalResult& r, std::span<const double> throughput_mbps, const FrameGrid& grid,
                    const std::filesystem::path& path);

}  // namespace mecsim
