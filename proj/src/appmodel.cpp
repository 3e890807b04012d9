#include "mecsim/appmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/core.h>

#include "mecsim/csv.hpp"

namespace mecsim {

namespace {

constexpr double kRelaxedEdgeMinMbps = 10.0;

std::size_t idx(Resolution r) { return static_cast<std::size_t>(r); }

// Indexed by Resolution: WVGA, 720P, 1080P, 2.2K.
constexpr double kLocalInferenceMs[] = {75.02, 95.69, 178.25, 232.02};
constexpr double kServerInferenceMs[] = {5.1, 10.4, 18.7, 23.4};

void check_anchors(Resolution r, const std::vector<AccuracyAnchor>& a) {
  if (a.empty()) throw std::invalid_argument(fmt::format("no accuracy anchors for {}", to_string(r)));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i].rate_mbps > 0)) {
      throw std::invalid_argument(fmt::format("{}: anchor rate must be positive", to_string(r)));
    }
    if (a[i].acc.wmap < 0 || a[i].acc.ap_person < 0) {
      throw std::invalid_argument(fmt::format("{}: accuracy must be non-negative", to_string(r)));
    }
    if (i == 0) continue;
    if (!(a[i].rate_mbps > a[i - 1].rate_mbps)) {
      throw std::invalid_argument(fmt::format("{}: anchors must be sorted by rate", to_string(r)));
    }
    if (a[i].acc.wmap < a[i - 1].acc.wmap || a[i].acc.ap_person < a[i - 1].acc.ap_person) {
      throw std::invalid_argument(fmt::format("{}: accuracy must not decrease with rate", to_string(r)));
    }
  }
}

double lerp(double x0, double y0, double x1, double y1, double x) {
  return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

}  // namespace

std::string_view to_string(Site s) { return s == Site::LOCAL ? "local" : "edge"; }

double inference_time(Resolution r, Site site) {
  return site == Site::LOCAL ? kLocalInferenceMs[idx(r)] : kServerInferenceMs[idx(r)];
}

double total_delay(Site site, Resolution r, double rtt_ms) {
  if (!(rtt_ms >= 0)) throw std::invalid_argument("rtt must be non-negative");
  if (site == Site::LOCAL && rtt_ms > 0) throw std::invalid_argument("local processing has no network rtt");
  const double encode = site == Site::EDGE ? kEncodeDelayMs : 0.0;
  return kFrameDelayMs + encode + inference_time(r, site) + rtt_ms;
}

double rtt_budget(double total_target_ms, Resolution r) {
  const double fixed = kFrameDelayMs + kEncodeDelayMs + std::round(inference_time(r, Site::EDGE));
  const double budget = total_target_ms - fixed;
  if (budget < 0) {
    throw std::invalid_argument(
        fmt::format("target {} ms is {} ms short of the fixed delay {} ms", total_target_ms, -budget, fixed));
  }
  return budget;
}

RateAccuracyCurve::RateAccuracyCurve(std::map<Resolution, std::vector<AccuracyAnchor>> anchors)
    : anchors_(std::move(anchors)) {
  for (const auto& [r, a] : anchors_) check_anchors(r, a);
}

RateAccuracyCurve RateAccuracyCurve::builtin() {
  return RateAccuracyCurve({
      {Resolution::R2p2K, {{30.09, {54.62, 67.27}}}},
      {Resolution::R1080P, {{26.00, {54.00, 66.11}}}},
      {Resolution::R720P, {{18.01, {50.27, 60.31}}}},
      {Resolution::WVGA, {{9.29, {36.57, 44.32}}}},
  });
}

RateAccuracyCurve RateAccuracyCurve::load_csv(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw ParseError(fmt::format("{}: missing header", path.string()));
  const csv::Header header(lines.front().text);
  const auto c_res = header.require("resolution", path);
  const auto c_rate = header.require("rate_mbps", path);
  const auto c_wmap = header.require("wmap", path);
  const auto c_ap = header.require("ap_person", path);

  std::map<Resolution, std::vector<AccuracyAnchor>> anchors;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& ln = lines[i];
    const auto f = csv::split(ln.text);
    if (f.size() != header.size()) {
      throw ParseError(fmt::format("{}: line {}: expected {} fields, got {}", path.string(), ln.number,
                                   header.size(), f.size()));
    }
    Resolution r;
    try {
      r = parse_resolution(f[c_res]);
    } catch (const std::exception& e) {
      throw ParseError(fmt::format("{}: line {}: {}", path.string(), ln.number, e.what()));
    }
    anchors[r].push_back({csv::to_double(f[c_rate], ln.number, "rate_mbps"),
                          {csv::to_double(f[c_wmap], ln.number, "wmap"),
                           csv::to_double(f[c_ap], ln.number, "ap_person")}});
  }
  try {
    return RateAccuracyCurve(std::move(anchors));
  } catch (const std::invalid_argument& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

const std::vector<AccuracyAnchor>& RateAccuracyCurve::anchors_for(Resolution r) const {
  const auto it = anchors_.find(r);
  if (it == anchors_.end()) {
    throw std::invalid_argument(fmt::format("no accuracy curve for {}", to_string(r)));
  }
  return it->second;
}

Accuracy RateAccuracyCurve::at(Resolution r, double rate_mbps) const {
  if (!(rate_mbps > 0)) throw std::invalid_argument("rate must be positive");
  const auto& a = anchors_for(r);
  if (rate_mbps >= a.back().rate_mbps) return a.back().acc;
  if (rate_mbps <= a.front().rate_mbps) {
    const auto& f = a.front();
    return {lerp(0, 0, f.rate_mbps, f.acc.wmap, rate_mbps), lerp(0, 0, f.rate_mbps, f.acc.ap_person, rate_mbps)};
  }
  const auto hi = std::upper_bound(a.begin(), a.end(), rate_mbps,
                                   [](double v, const AccuracyAnchor& x) { return v < x.rate_mbps; });
  const auto lo = std::prev(hi);
  return {lerp(lo->rate_mbps, lo->acc.wmap, hi->rate_mbps, hi->acc.wmap, rate_mbps),
          lerp(lo->rate_mbps, lo->acc.ap_person, hi->rate_mbps, hi->acc.ap_person, rate_mbps)};
}

Accuracy RateAccuracyCurve::plateau(Resolution r) const { return anchors_for(r).back().acc; }

Accuracy accuracy_at(Resolution r, double rate_mbps) { return RateAccuracyCurve::builtin().at(r, rate_mbps); }

double detection_range(Resolution r) {
  switch (r) {
    case Resolution::WVGA: return 6.0;
    case Resolution::R720P: return 9.0;
    case Resolution::R1080P: return 12.0;
    case Resolution::R2p2K: break;
  }
  throw std::invalid_argument(fmt::format("detection range for {} is not characterized", to_string(r)));
}

Resolution best_resolution(double rate_mbps, bool allow_2p2k) {
  if (rate_mbps < kBandWvgaMaxMbps) return Resolution::WVGA;
  if (rate_mbps < kBand720pMaxMbps) return Resolution::R720P;
  if (allow_2p2k && rate_mbps >= kBand1080pMaxMbps) return Resolution::R2p2K;
  return Resolution::R1080P;
}

std::vector<double> allocate_cameras(double throughput_mbps, CameraStrategy strategy) {
  if (!(throughput_mbps >= kMinEdgeRateMbps)) return {};
  if (throughput_mbps < kCameraFullRateMbps) return {throughput_mbps};
  std::vector<double> rates;
  if (strategy == CameraStrategy::UNIFORM) {
    const auto k = std::min<int>(kMaxCameras, static_cast<int>(std::floor(throughput_mbps / kCameraFullRateMbps)));
    rates.assign(static_cast<std::size_t>(k), kCameraFullRateMbps);
    return rates;
  }
  rates.push_back(kCameraFullRateMbps);
  double used = kCameraFullRateMbps;
  while (static_cast<int>(rates.size()) < kMaxCameras && used + kCameraSideRateMbps <= throughput_mbps) {
    rates.push_back(kCameraSideRateMbps);
    used += kCameraSideRateMbps;
  }
  return rates;
}

namespace {

PolicyDecision local_decision(Resolution r, double target_ms, const RateAccuracyCurve& curve) {
  PolicyDecision d;
  d.site = Site::LOCAL;
  d.resolution = r;
  d.rates_mbps = {0.0};
  d.n_cameras = 1;
  d.expected = curve.plateau(r);
  d.range_m = detection_range(r);
  d.total_delay_ms = total_delay(Site::LOCAL, r, 0.0);
  d.compliant = d.total_delay_ms <= target_ms;
  return d;
}

PolicyDecision edge_decision(Resolution r, std::vector<double> rates, double target_ms, double rtt_ms,
                             const RateAccuracyCurve& curve) {
  PolicyDecision d;
  d.site = Site::EDGE;
  d.resolution = r;
  d.rates_mbps = std::move(rates);
  d.n_cameras = static_cast<int>(d.rates_mbps.size());
  d.expected = curve.at(r, d.rates_mbps.front());
  d.range_m = detection_range(r);
  d.total_delay_ms = total_delay(Site::EDGE, r, rtt_ms);
  d.compliant = d.total_delay_ms <= target_ms;
  return d;
}

bool local_720p_fits(double target_ms) {
  return total_delay(Site::LOCAL, Resolution::R720P, 0.0) <= target_ms;
}

}  // namespace

PolicyDecision decide(double throughput_mbps, double total_target_ms, CameraStrategy strategy,
                      const PolicyParams& policy, const RateAccuracyCurve& curve) {
  if (!(throughput_mbps >= 0)) throw std::invalid_argument("throughput must be non-negative");
  const double rtt = policy.edge_rtt_ms;
  if (local_720p_fits(total_target_ms)) {
    if (throughput_mbps >= kRelaxedEdgeMinMbps) {
      return edge_decision(Resolution::R1080P, allocate_cameras(throughput_mbps, strategy), total_target_ms,
                           rtt, curve);
    }
    return local_decision(Resolution::R720P, total_target_ms, curve);
  }
  if (throughput_mbps >= kCameraFullRateMbps) {
    return edge_decision(Resolution::R1080P, allocate_cameras(throughput_mbps, strategy), total_target_ms, rtt,
                         curve);
  }
  if (throughput_mbps >= kBand720pMaxMbps) {
    return edge_decision(Resolution::R1080P, {throughput_mbps}, total_target_ms, rtt, curve);
  }
  if (throughput_mbps >= kMinEdgeRateMbps) {
    return edge_decision(Resolution::R720P, {throughput_mbps}, total_target_ms, rtt, curve);
  }
  return local_decision(Resolution::WVGA, total_target_ms, curve);
}

double expected_performance(std::span<const double> probabilities, std::span<const double> accuracies) {
  if (probabilities.size() != accuracies.size()) {
    throw std::invalid_argument("one accuracy per probability required");
  }
  double sum_p = 0.0;
  double sum_pa = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (!(probabilities[i] >= 0)) throw std::invalid_argument("probabilities must be non-negative");
    sum_p += probabilities[i];
    sum_pa += probabilities[i] * accuracies[i];
  }
  if (sum_p > 1.0 + 1e-9) throw std::invalid_argument("probabilities sum to more than 1");
  if (sum_p == 0.0) throw std::invalid_argument("all probabilities are zero");
  return sum_pa / sum_p;
}

std::vector<PolicyBand> policy_bands(double total_target_ms, const BandAverages& averages,
                                     const RateAccuracyCurve& curve) {
  const double inf = INFINITY;
  const Accuracy top = curve.plateau(Resolution::R1080P);
  if (local_720p_fits(total_target_ms)) {
    return {
        {"edge_full", kCameraFullRateMbps, inf, Site::EDGE, top, true},
        {"edge_reduced", kRelaxedEdgeMinMbps, kCameraFullRateMbps, Site::EDGE, averages.mid, true},
        {"local_720p", 0.0, kRelaxedEdgeMinMbps, Site::LOCAL, curve.plateau(Resolution::R720P), true},
    };
  }
  const bool wvga_ok = total_delay(Site::LOCAL, Resolution::WVGA, 0.0) <= total_target_ms;
  return {
      {"edge_full", kCameraFullRateMbps, inf, Site::EDGE, top, true},
      {"edge_1080p", kBand720pMaxMbps, kCameraFullRateMbps, Site::EDGE, averages.mid, true},
      {"edge_720p", kMinEdgeRateMbps, kBand720pMaxMbps, Site::EDGE, averages.low, true},
      {"local_wvga", 0.0, kMinEdgeRateMbps, Site::LOCAL, curve.plateau(Resolution::WVGA), wvga_ok},
  };
}

}  // namespace mecsim
