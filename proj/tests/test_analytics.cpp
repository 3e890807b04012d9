#include <doctest.h>

#include <algorithm>
#include <random>

#include "mecsim/analytics.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace mecsim;
using mecsim::testing::LogShape;
using mecsim::testing::oracle_throughput;
using mecsim::testing::random_log;

namespace {

const FrameGrid kGrid = FrameGrid::from_hz(30);

PacketRecord ul_pkt(std::int64_t id, Micros sent, Micros delay, std::int64_t bits = 8192) {
  return {id, Direction::UL, bits, sent, sent + delay, {}, 1};
}

PacketRecord dl_pkt(std::int64_t id, Micros sent, std::optional<Micros> delay) {
  PacketRecord r{id, Direction::DL, 33333, sent, std::nullopt, {}, 1};
  if (delay) r.t_delivered = sent + *delay;
  return r;
}

RateSeries series_mbps(std::vector<double> mbps, double d_max = 30) {
  RateSeries s{kGrid, d_max, {}};
  for (double v : mbps) s.bps.push_back(v * 1e6);
  return s;
}

}  // namespace

TEST_CASE("delay-constrained throughput examples") {
  SUBCASE("empty logs give an all-zero series") {
    const auto s = delay_constrained_throughput({}, {}, kGrid, 30.0, Micros{1'000'000});
    CHECK(s.bps.size() == 30);
    CHECK(std::all_of(s.bps.begin(), s.bps.end(), [](double v) { return v == 0.0; }));
  }
  SUBCASE("100 packets in one interval, 20 ms round trip") {
    std::vector<PacketRecord> ul;
    for (int i = 0; i < 100; ++i) ul.push_back(ul_pkt(i, Micros{100 + i * 100}, Micros{15'000}));
    const std::vector<PacketRecord> dl{dl_pkt(0, Micros{0}, Micros{5'000})};
    const auto s = delay_constrained_throughput(ul, dl, kGrid, 30.0);
    REQUIRE(s.bps.size() == 1);
    CHECK(s.bps[0] == doctest::Approx(24.576e6));
  }
  SUBCASE("the same packets at 35 ms are excluded") {
    std::vector<PacketRecord> ul;
    for (int i = 0; i < 100; ++i) ul.push_back(ul_pkt(i, Micros{100 + i * 100}, Micros{30'000}));
    const std::vector<PacketRecord> dl{dl_pkt(0, Micros{0}, Micros{5'000})};
    CHECK(delay_constrained_throughput(ul, dl, kGrid, 30.0).bps[0] == 0.0);
  }
  SUBCASE("rejects a negative constraint") {
    CHECK_THROWS_AS(delay_constrained_throughput({}, {}, kGrid, -1.0), std::invalid_argument);
  }
}

TEST_CASE("feedback pairing") {
  // Interval 0: [0, 33333), interval 1: [33333, 66666), interval 2: [66666, 100000).
  const std::vector<PacketRecord> dl{dl_pkt(0, Micros{1'000}, Micros{4'000}), dl_pkt(1, Micros{40'000}, Micros{9'000}),
                                     dl_pkt(2, Micros{50'000}, Micros{1'000})};
  const RttPairing p(dl, kGrid);
  CHECK(p.feedback_delay(Micros{500}) == Micros{4'000});
  // Own interval wins even when the feedback is sent later than the packet.
  CHECK(p.feedback_delay(Micros{34'000}) == Micros{9'000});
  // No feedback in interval 2: the nearest preceding one.
  CHECK(p.feedback_delay(Micros{70'000}) == Micros{1'000});

  const std::vector<PacketRecord> late{dl_pkt(0, Micros{40'000}, Micros{4'000})};
  CHECK_FALSE(RttPairing(late, kGrid).feedback_delay(Micros{10}).has_value());

  const std::vector<PacketRecord> lost{dl_pkt(0, Micros{0}, std::nullopt)};
  CHECK(RttPairing(lost, kGrid).feedback_delay(Micros{10}) == RttPairing::kLost);
}

TEST_CASE("interval boundaries are half-open on the send time") {
  const Micros b = kGrid.start(1);
  const std::vector<PacketRecord> ul{ul_pkt(0, b - Micros{1}, Micros{1'000}), ul_pkt(1, b, Micros{1'000}, 4096)};
  const std::vector<PacketRecord> dl{dl_pkt(0, Micros{0}, Micros{1'000})};
  const auto s = delay_constrained_throughput(ul, dl, kGrid, 30.0);
  REQUIRE(s.bps.size() == 2);
  CHECK(s.bps[0] == 8192 * 30.0);
  CHECK(s.bps[1] == 4096 * 30.0);
}

TEST_CASE("matches the brute-force oracle on random logs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    LogShape shape;
    shape.n_ul = std::uniform_int_distribution<int>(0, 2000)(rng);
    shape.n_dl = std::uniform_int_distribution<int>(0, 60)(rng);
    const auto ul = random_log(rng, shape.n_ul, Direction::UL, shape);
    const auto dl = random_log(rng, shape.n_dl, Direction::DL, shape);
    for (double d : {0.0, 12.5, 30.0, 55.0, 1000.0}) {
      const auto got = delay_constrained_throughput(ul, dl, kGrid, d);
      const auto want = oracle_throughput(ul, dl, 30.0, d);
      REQUIRE(got.bps == want);
    }
  }
}

TEST_CASE("monotone in d_max and bounded by delivered throughput") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    LogShape shape;
    const auto ul = random_log(rng, 500, Direction::UL, shape);
    const auto dl = random_log(rng, 40, Direction::DL, shape);
    const auto h = log_horizon(ul, dl);
    const auto all = delivered_throughput(ul, kGrid, h);
    RateSeries prev = delay_constrained_throughput(ul, dl, kGrid, 0.0, h);
    for (double d : {5.0, 20.0, 40.0, 80.0, 200.0}) {
      const auto cur = delay_constrained_throughput(ul, dl, kGrid, d, h);
      for (std::size_t k = 0; k < cur.bps.size(); ++k) {
        CHECK(cur.bps[k] >= prev.bps[k]);
        CHECK(cur.bps[k] <= all.bps[k]);
      }
      prev = cur;
    }
  }
}

TEST_CASE("max fallback") {
  const auto s = series_mbps({10, 0, 36});
  CHECK(max_fallback(s, series_mbps({0, 0, 0})) == s);
  CHECK(max_fallback(series_mbps({120}), series_mbps({36})).bps[0] == 120e6);
  CHECK_THROWS_AS(max_fallback(s, series_mbps({1, 2})), std::invalid_argument);
  RateSeries other = s;
  other.grid = FrameGrid::from_hz(60);
  CHECK_THROWS_AS(max_fallback(s, other), std::invalid_argument);
  CHECK_THROWS_AS(max_fallback(s, series_mbps({1, 2, 3}, 40)), std::invalid_argument);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 150);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a, b;
    for (int i = 0; i < 50; ++i) {
      a.push_back(u(rng));
      b.push_back(u(rng));
    }
    const auto m = max_fallback(series_mbps(a), series_mbps(b));
    for (double req : {0.0, 10e6, 26e6, 56e6, 104e6}) {
      CHECK(availability(m, req) >= availability(series_mbps(a), req));
      CHECK(availability(m, req) >= availability(series_mbps(b), req));
    }
  }
}

TEST_CASE("availability") {
  CHECK(availability(series_mbps({1, 2}), 0.0) == 1.0);
  CHECK(availability(series_mbps({10, 20, 30, 40}), 25e6) == 0.5);
  CHECK(availability(series_mbps({120, 120, 120}), 104e6) == 1.0);
  CHECK(availability(RateSeries{kGrid, 30, {}}, 1.0) == 0.0);
}

TEST_CASE("camera support matrix") {
  const std::vector<double> uniform{26, 26, 26, 26};
  const std::vector<double> priority{26, 10, 10, 10};
  const std::vector<RateSeries> rows{series_mbps({0, 0, 0}, 30)};
  const auto m = camera_support_matrix(rows, uniform);
  CHECK(m.required_mbps(4) == 104);
  CHECK(m.cells == std::vector<std::vector<double>>{{0, 0, 0, 0}});
  CHECK(camera_support_matrix(rows, priority).required_mbps(4) == 56);
  CHECK_THROWS_AS(camera_support_matrix(rows, std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(camera_support_matrix(rows, std::vector<double>{26, 0}), std::invalid_argument);

  // Rows nonincreasing in camera count, columns nondecreasing in d_max.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    LogShape shape;
    shape.n_ul = 3000;
    const auto ul = random_log(rng, shape.n_ul, Direction::UL, shape);
    const auto dl = random_log(rng, 60, Direction::DL, shape);
    const std::vector<double> dmax{10, 30, 40, 50, 81};
    // Small rates so the random logs land on both sides of the thresholds.
    const std::vector<double> rates{2, 1, 1, 1};
    const auto h = camera_support_matrix(ul, dl, kGrid, dmax, rates);
    for (std::size_t r = 0; r < dmax.size(); ++r) {
      for (std::size_t n = 1; n < rates.size(); ++n) CHECK(h.cells[r][n] <= h.cells[r][n - 1]);
      if (r > 0) {
        for (std::size_t n = 0; n < rates.size(); ++n) CHECK(h.cells[r][n] >= h.cells[r - 1][n]);
      }
    }
  }
}

TEST_CASE("empirical CDF") {
  CHECK(empirical_cdf(std::vector<double>{5}) == std::vector<CdfPoint>{{5, 1.0}});
  CHECK(empirical_cdf(std::vector<double>{4, 2, 1, 2}) == std::vector<CdfPoint>{{1, 0.25}, {2, 0.75}, {4, 1.0}});
  CHECK(median(std::vector<double>(9, 15.0)) == 15.0);
  CHECK_THROWS_AS(empirical_cdf(std::vector<double>{}), std::invalid_argument);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1 + trial);
    for (auto& x : v) x = std::round(u(rng));
    const auto cdf = empirical_cdf(v);
    CHECK(cdf.back().fraction == 1.0);
    for (std::size_t i = 1; i < cdf.size(); ++i) {
      CHECK(cdf[i].value > cdf[i - 1].value);
      CHECK(cdf[i].fraction > cdf[i - 1].fraction);
    }
  }
}

TEST_CASE("round trip per frame") {
  const std::vector<PacketRecord> ul{ul_pkt(0, Micros{40'000}, Micros{7'500}), ul_pkt(1, Micros{40'001}, Micros{1})};
  std::vector<PacketRecord> ul_with_drop = ul;
  ul_with_drop[1].t_delivered.reset();
  const std::vector<PacketRecord> dl{dl_pkt(0, Micros{35'000}, Micros{7'500})};
  const auto r = rtt_per_frame(ul_with_drop, dl, kGrid);
  CHECK(r.rtt_ms == std::vector<double>{15.0});

  const std::vector<PacketRecord> early{ul_pkt(0, Micros{10}, Micros{1'000})};
  const auto u = rtt_per_frame(early, dl, kGrid);
  CHECK(u.rtt_ms.empty());
  CHECK(u.unpaired == 1);
}
