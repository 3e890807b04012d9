#pragma once

// Application layer: end-to-end delay budget, rate-to-accuracy and
// detection-range lookups, and the adaptive offloading policy.

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mecsim/model.hpp"

namespace mecsim {

enum class Site { LOCAL, EDGE };
std::string_view to_string(Site s);

constexpr double kFrameDelayMs = 33.0;
constexpr double kEncodeDelayMs = 17.0;

/// Detector inference time in ms on the wearable (LOCAL) or the edge server.
double inference_time(Resolution r, Site site);

/// Frame + encoding + inference + RTT. Local processing has no encoding and
/// no network leg, so `rtt_ms` must be 0 for LOCAL.
double total_delay(Site site, Resolution r, double rtt_ms);

/// RTT left for the network under a total-delay target, with the server
/// inference time rounded to whole ms. Throws when the fixed part alone
/// exceeds the target.
double rtt_budget(double total_target_ms, Resolution r);

struct Accuracy {
  double wmap = 0.0;
  double ap_person = 0.0;
  friend bool operator==(const Accuracy&, const Accuracy&) = default;
};

struct AccuracyAnchor {
  double rate_mbps = 0.0;
  Accuracy acc;
};

/// Piecewise-linear detection accuracy versus encoded bit rate, per
/// resolution. Below the first anchor the curve falls linearly to (0, 0);
/// above the last it stays at the last anchor.
class RateAccuracyCurve {
 public:
  explicit RateAccuracyCurve(std::map<Resolution, std::vector<AccuracyAnchor>> anchors);

  /// Plateau anchors only.
  static RateAccuracyCurve builtin();
  /// CSV with header `resolution,rate_mbps,wmap,ap_person`.
  static RateAccuracyCurve load_csv(const std::filesystem::path& path);

  Accuracy at(Resolution r, double rate_mbps) const;
  Accuracy plateau(Resolution r) const;
  bool has(Resolution r) const { return anchors_.count(r) != 0; }

 private:
  const std::vector<AccuracyAnchor>& anchors_for(Resolution r) const;

  std::map<Resolution, std::vector<AccuracyAnchor>> anchors_;
};

Accuracy accuracy_at(Resolution r, double rate_mbps);

/// Distance in m at which standing people are still reliably detected.
/// Throws for 2.2K, which was not characterized.
double detection_range(Resolution r);

constexpr double kBandWvgaMaxMbps = 0.35;
constexpr double kBand720pMaxMbps = 6.0;
constexpr double kBand1080pMaxMbps = 26.2;

Resolution best_resolution(double rate_mbps, bool allow_2p2k = false);

constexpr double kCameraFullRateMbps = 26.0;
constexpr double kCameraSideRateMbps = 10.0;
constexpr int kMaxCameras = 4;
constexpr double kMinEdgeRateMbps = 1.0;

/// Per-camera upload rates; empty when the throughput is below 1 Mbps.
std::vector<double> allocate_cameras(double throughput_mbps, CameraStrategy strategy);

struct PolicyDecision {
  Site site = Site::LOCAL;
  Resolution resolution = Resolution::WVGA;
  std::vector<double> rates_mbps;
  int n_cameras = 1;
  Accuracy expected;
  double range_m = 0.0;
  double total_delay_ms = 0.0;
  bool compliant = false;
};

/// Offloading decision for one frame interval.
///
/// When local 720P processing fits the target, the edge is used from 10 Mbps
/// upward and local 720P below. Otherwise the edge is used down to 1 Mbps
/// (1080P from 6 Mbps, 720P below) and local WVGA is the non-compliant last
/// resort. Edge decisions use `policy.edge_rtt_ms` for the delay budget.
PolicyDecision decide(double throughput_mbps, double total_target_ms, CameraStrategy strategy,
                      const PolicyParams& policy = {},
                      const RateAccuracyCurve& curve = RateAccuracyCurve::builtin());

/// Availability-conditioned mean: sum(p * acc) / sum(p).
double expected_performance(std::span<const double> probabilities, std::span<const double> accuracies);

/// Throughput band of the policy, with the mean accuracy achieved while the
/// throughput stays inside it.
struct PolicyBand {
  std::string label;
  double lo_mbps = 0.0;
  double hi_mbps = 0.0;
  Site site = Site::EDGE;
  Accuracy acc;
  bool compliant = true;
};

/// Mean accuracy in the 1080P band below the full camera rate, and in the
/// 720P band.
struct BandAverages {
  Accuracy mid{51.5, 63.2};
  Accuracy low{41.1, 49.7};
};

/// Bands partitioning [0, inf) for a total-delay target, highest first.
std::vector<PolicyBand> policy_bands(double total_target_ms, const BandAverages& averages = {},
                                     const RateAccuracyCurve& curve = RateAccuracyCurve::builtin());

}  // namespace mecsim
