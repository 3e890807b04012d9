#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "mecsim/appmodel.hpp"
#include "support.hpp"

using namespace mecsim;

namespace {

double sum(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("inference times") {
  CHECK(inference_time(Resolution::R1080P, Site::EDGE) == 18.7);
  CHECK(inference_time(Resolution::WVGA, Site::LOCAL) == 75.02);
  CHECK(inference_time(Resolution::R2p2K, Site::EDGE) == 23.4);
  CHECK(inference_time(Resolution::R2p2K, Site::LOCAL) == 232.02);
  CHECK(inference_time(Resolution::R1080P, Site::LOCAL) == 178.25);
  CHECK(inference_time(Resolution::R720P, Site::LOCAL) == 95.69);
  CHECK(inference_time(Resolution::R720P, Site::EDGE) == 10.4);
  CHECK(inference_time(Resolution::WVGA, Site::EDGE) == 5.1);
  for (auto r : kAllResolutions) CHECK(inference_time(r, Site::EDGE) < inference_time(r, Site::LOCAL));
}

TEST_CASE("total delay") {
  CHECK(total_delay(Site::EDGE, Resolution::R1080P, 15) == doctest::Approx(83.7));
  CHECK(total_delay(Site::EDGE, Resolution::R1080P, 37) == doctest::Approx(105.7));
  CHECK(total_delay(Site::LOCAL, Resolution::WVGA, 0) == doctest::Approx(108.02));
  CHECK(total_delay(Site::LOCAL, Resolution::R720P, 0) == doctest::Approx(128.69));
  CHECK_THROWS_AS(total_delay(Site::LOCAL, Resolution::WVGA, 5), std::invalid_argument);
  CHECK_THROWS_AS(total_delay(Site::EDGE, Resolution::WVGA, -1), std::invalid_argument);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> rtt(0, 200);
  for (int i = 0; i < 100; ++i) {
    const double x = rtt(rng);
    for (auto r : kAllResolutions) {
      CHECK(total_delay(Site::EDGE, r, x) == 33.0 + 17.0 + inference_time(r, Site::EDGE) + x);
    }
  }
}

TEST_CASE("rtt budget") {
  CHECK(rtt_budget(100, Resolution::R1080P) == 31.0);
  CHECK(rtt_budget(150, Resolution::R1080P) == 81.0);
  CHECK(rtt_budget(69, Resolution::R1080P) == 0.0);
  try {
    rtt_budget(60, Resolution::R1080P);
    FAIL("expected a shortfall");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find('9') != std::string::npos);
  }
  for (int t = 75; t <= 300; t += 7) {
    for (auto r : kAllResolutions) {
      CHECK(rtt_budget(t, r) + 33 + 17 + std::round(inference_time(r, Site::EDGE)) == t);
    }
  }
}

TEST_CASE("accuracy lookup") {
  CHECK(accuracy_at(Resolution::R1080P, 26.0) == Accuracy{54.0, 66.11});
  CHECK(accuracy_at(Resolution::WVGA, 9.29) == Accuracy{36.57, 44.32});
  CHECK(accuracy_at(Resolution::R720P, 18.01) == Accuracy{50.27, 60.31});
  CHECK(accuracy_at(Resolution::R2p2K, 30.09) == Accuracy{54.62, 67.27});
  CHECK(accuracy_at(Resolution::R1080P, 100) == Accuracy{54.0, 66.11});
  CHECK(accuracy_at(Resolution::R1080P, 13).wmap == doctest::Approx(27.0));
  CHECK_THROWS_AS(accuracy_at(Resolution::R1080P, 0), std::invalid_argument);

  for (auto r : kAllResolutions) {
    double prev = 0;
    for (double rate = 0.05; rate < 60; rate += 0.05) {
      const auto a = accuracy_at(r, rate);
      CHECK(a.wmap >= prev);
      prev = a.wmap;
    }
  }
}

TEST_CASE("custom curves") {
  const auto shipped = RateAccuracyCurve::load_csv(std::filesystem::path(MECSIM_SOURCE_DIR) / "data/rate_accuracy.csv");
  for (auto r : kAllResolutions) CHECK(shipped.plateau(r) == RateAccuracyCurve::builtin().plateau(r));

  const RateAccuracyCurve c({{Resolution::R720P, {{2.0, {30, 40}}, {6.0, {46, 56}}, {18.01, {50.27, 60.31}}}}});
  CHECK(c.at(Resolution::R720P, 1.0) == Accuracy{15, 20});
  CHECK(c.at(Resolution::R720P, 4.0).wmap == doctest::Approx(38.0));
  // Continuous at anchors.
  CHECK(c.at(Resolution::R720P, 6.0 - 1e-9).wmap == doctest::Approx(46.0));
  CHECK(c.at(Resolution::R720P, 6.0 + 1e-9).wmap == doctest::Approx(46.0));
  CHECK_FALSE(c.has(Resolution::WVGA));
  CHECK_THROWS_AS(c.at(Resolution::WVGA, 3), std::invalid_argument);

  using Anchors = std::map<Resolution, std::vector<AccuracyAnchor>>;
  CHECK_THROWS_AS(RateAccuracyCurve(Anchors{{Resolution::WVGA, {{5, {30, 30}}, {2, {40, 40}}}}}), std::invalid_argument);
  CHECK_THROWS_AS(RateAccuracyCurve(Anchors{{Resolution::WVGA, {{2, {40, 40}}, {5, {30, 30}}}}}), std::invalid_argument);

  const auto dir = mecsim::testing::temp_dir("curve");
  {
    std::ofstream f(dir / "bad.csv");
    f << "resolution,rate_mbps,wmap,ap_person\n720P,18.01,50.27\n";
  }
  try {
    RateAccuracyCurve::load_csv(dir / "bad.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("detection range") {
  CHECK(detection_range(Resolution::WVGA) == 6.0);
  CHECK(detection_range(Resolution::R720P) == 9.0);
  CHECK(detection_range(Resolution::R1080P) == 12.0);
  CHECK_THROWS_AS(detection_range(Resolution::R2p2K), std::invalid_argument);
}

TEST_CASE("best resolution") {
  CHECK(best_resolution(3) == Resolution::R720P);
  CHECK(best_resolution(10) == Resolution::R1080P);
  CHECK(best_resolution(0.2) == Resolution::WVGA);
  CHECK(best_resolution(0.35) == Resolution::R720P);
  CHECK(best_resolution(std::nextafter(0.35, 0.0)) == Resolution::WVGA);
  CHECK(best_resolution(6.0) == Resolution::R1080P);
  CHECK(best_resolution(std::nextafter(6.0, 0.0)) == Resolution::R720P);
  CHECK(best_resolution(100) == Resolution::R1080P);
  CHECK(best_resolution(26.2, true) == Resolution::R2p2K);
  CHECK(best_resolution(std::nextafter(26.2, 0.0), true) == Resolution::R1080P);
}

TEST_CASE("camera allocation") {
  using V = std::vector<double>;
  CHECK(allocate_cameras(104, CameraStrategy::UNIFORM) == V{26, 26, 26, 26});
  CHECK(allocate_cameras(56, CameraStrategy::PRIORITY) == V{26, 10, 10, 10});
  CHECK(allocate_cameras(26, CameraStrategy::UNIFORM) == V{26});
  CHECK(allocate_cameras(200, CameraStrategy::UNIFORM) == V{26, 26, 26, 26});
  CHECK(allocate_cameras(60, CameraStrategy::UNIFORM) == V{26, 26});
  CHECK(allocate_cameras(45, CameraStrategy::PRIORITY) == V{26, 10});
  CHECK(allocate_cameras(12, CameraStrategy::UNIFORM) == V{12});
  CHECK(allocate_cameras(0.5, CameraStrategy::UNIFORM).empty());

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> t(0, 300);
  for (int i = 0; i < 500; ++i) {
    const double x = t(rng);
    for (auto s : {CameraStrategy::UNIFORM, CameraStrategy::PRIORITY}) {
      const auto a = allocate_cameras(x, s);
      CHECK(sum(a) <= x + 1e-9);
      CHECK(a.size() <= 4);
      if (x >= 1) CHECK(a.size() >= 1);
    }
  }
}

TEST_CASE("offloading decisions") {
  const auto d1 = decide(120, 100, CameraStrategy::UNIFORM);
  CHECK(d1.site == Site::EDGE);
  CHECK(d1.resolution == Resolution::R1080P);
  CHECK(d1.rates_mbps == std::vector<double>{26, 26, 26, 26});
  CHECK(d1.n_cameras == 4);
  CHECK(d1.compliant);
  CHECK(d1.expected == Accuracy{54.0, 66.11});
  CHECK(d1.range_m == 12.0);

  const auto d2 = decide(15, 100, CameraStrategy::UNIFORM);
  CHECK(d2.site == Site::EDGE);
  CHECK(d2.resolution == Resolution::R1080P);
  CHECK(d2.rates_mbps == std::vector<double>{15});
  CHECK(d2.compliant);

  const auto d3 = decide(3, 100, CameraStrategy::UNIFORM);
  CHECK(d3.site == Site::EDGE);
  CHECK(d3.resolution == Resolution::R720P);
  CHECK(d3.n_cameras == 1);
  CHECK(d3.range_m == 9.0);

  const auto d4 = decide(0.5, 100, CameraStrategy::UNIFORM);
  CHECK(d4.site == Site::LOCAL);
  CHECK(d4.resolution == Resolution::WVGA);
  CHECK_FALSE(d4.compliant);
  CHECK(d4.total_delay_ms == doctest::Approx(108.02));

  const auto d5 = decide(15, 150, CameraStrategy::PRIORITY);
  CHECK(d5.site == Site::EDGE);
  CHECK(d5.resolution == Resolution::R1080P);
  CHECK(d5.compliant);

  const auto d6 = decide(5, 150, CameraStrategy::PRIORITY);
  CHECK(d6.site == Site::LOCAL);
  CHECK(d6.resolution == Resolution::R720P);
  CHECK(d6.compliant);
  CHECK(d6.total_delay_ms == doctest::Approx(128.69));

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> t(0, 250);
  for (int i = 0; i < 1000; ++i) {
    const double x = t(rng);
    for (double target : {100.0, 150.0}) {
      for (auto s : {CameraStrategy::UNIFORM, CameraStrategy::PRIORITY}) {
        const auto d = decide(x, target, s);
        CHECK(d.resolution != Resolution::R2p2K);
        CHECK(d.n_cameras >= 1);
        CHECK(d.n_cameras <= 4);
        CHECK(d.compliant == (d.total_delay_ms <= target));
        if (d.site == Site::EDGE) CHECK(sum(d.rates_mbps) <= x + 1e-9);
        if (x >= 26 && target == 100) CHECK(d.expected.wmap == 54.0);
      }
    }
  }
}

TEST_CASE("expected performance") {
  const std::vector<double> p{0.97, 0.02, 0.01};
  const double wmap = expected_performance(p, std::vector<double>{54.0, 51.5, 41.1});
  const double ap = expected_performance(p, std::vector<double>{66.1, 63.2, 49.7});
  CHECK(std::abs(wmap - 53.8) <= 0.3);
  CHECK(std::abs(ap - 65.9) <= 0.3);
  CHECK(expected_performance(std::vector<double>{1.0}, std::vector<double>{50.27}) == 50.27);
  // Conditioned on availability.
  CHECK(expected_performance(std::vector<double>{0.25, 0.25}, std::vector<double>{40, 60}) == 50.0);
  CHECK_THROWS_AS(expected_performance(std::vector<double>{0, 0}, std::vector<double>{1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(expected_performance(std::vector<double>{0.7, 0.7}, std::vector<double>{1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(expected_performance(std::vector<double>{1.0}, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("policy bands") {
  const auto strict = policy_bands(100);
  REQUIRE(strict.size() == 4);
  CHECK(strict[0].lo_mbps == 26.0);
  CHECK(strict[0].acc == Accuracy{54.0, 66.11});
  CHECK(strict[1].acc == Accuracy{51.5, 63.2});
  CHECK(strict[2].acc == Accuracy{41.1, 49.7});
  CHECK(strict[3].site == Site::LOCAL);
  CHECK_FALSE(strict[3].compliant);
  for (std::size_t i = 1; i < strict.size(); ++i) CHECK(strict[i].hi_mbps == strict[i - 1].lo_mbps);
  CHECK(strict.back().lo_mbps == 0.0);

  const auto relaxed = policy_bands(150);
  REQUIRE(relaxed.size() == 3);
  CHECK(relaxed[1].lo_mbps == 10.0);
  CHECK(relaxed[2].site == Site::LOCAL);
  CHECK(relaxed[2].compliant);
  CHECK(relaxed[2].acc == Accuracy{50.27, 60.31});
}
