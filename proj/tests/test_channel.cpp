#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include "mecsim/channel.hpp"
#include "support.hpp"

using namespace mecsim;

namespace {

RaySet one_ray(double gain_db, double az, double el, double heading = 0.0) {
  RaySet s;
  s.bs_id = 1;
  s.ue_heading_deg = heading;
  Ray r;
  r.path_gain_db = gain_db;
  r.aoa_az_deg = az;
  r.aoa_el_deg = el;
  s.rays.push_back(r);
  return s;
}

ScenarioConfig small_scenario(std::uint64_t seed) {
  auto cfg = ScenarioConfig::defaults();
  cfg.route.waypoints = {{0, 0}, {20, 0}, {20, 10}};
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("route sampling") {
  RouteSpec spec{{{0, 0}, {10, 0}}, 1.0, 1.4};
  const auto pts = build_route(spec);
  REQUIRE(pts.size() == 11);
  CHECK(pts.back().position == Vec2{10, 0});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].t == from_seconds(static_cast<double>(i) / 1.4));
    CHECK(pts[i].arc_m == doctest::Approx(static_cast<double>(i)));
  }
  CHECK(pts[1].t == Micros{714'286});
  CHECK(pts[2].t == Micros{1'428'571});

  // L-shaped 180 m route.
  RouteSpec l{{{0, 0}, {100, 0}, {100, 80}}, 1.0, 1.4};
  const auto lp = build_route(l);
  CHECK(lp.size() == 181);
  CHECK(lp[150].position.x == doctest::Approx(100.0));
  CHECK(lp[150].position.y == doctest::Approx(50.0));
  CHECK(lp[150].heading_deg == doctest::Approx(90.0));

  CHECK_THROWS_AS(build_route(RouteSpec{{{0, 0}}, 1.0, 1.4}), InvalidRoute);
  CHECK_THROWS_AS(build_route(RouteSpec{{{0, 0}, {1, 0}}, 0.0, 1.4}), InvalidRoute);
}

TEST_CASE("path loss") {
  const PathLossParams p;
  CHECK(path_loss_db(1, 28, true, p) == doctest::Approx(32.4 + 20 * std::log10(28.0)));
  // Published to two decimals.
  CHECK(std::abs(path_loss_db(1, 28, true, p) - 61.34) <= 0.005);
  CHECK(std::abs(path_loss_db(1, 1.9, true, p) - 37.98) <= 0.005);
  CHECK(std::abs(path_loss_db(100, 28, true, p) - 101.34) <= 0.005);
  CHECK(path_loss_db(0.2, 28, true, p) == path_loss_db(1, 28, true, p));
  CHECK(path_loss_db(50, 28, false, p) > path_loss_db(50, 28, true, p) + p.nlos_offset_db - 1e-9);
  double prev = 0;
  for (double d = 0.5; d < 500; d *= 1.1) {
    const double v = path_loss_db(d, 28, false, p);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("ray generation") {
  const BaseStationSpec bs{1, {50, 0}, 10.0, true, true, {}};
  const RoutePoint at{{0, 0}, 0.0, 0.0, Micros{0}};
  const auto tc = TechConfig::mmwave_defaults();
  Rng a(42), b(42);
  const auto los = generate_rays(at, bs, 1.5, tc, true, a);
  CHECK(std::count_if(los.rays.begin(), los.rays.end(), [](const Ray& r) { return r.los; }) == 1);
  CHECK(los.rays.size() == static_cast<std::size_t>(1 + tc.rays.n_scatter));
  const double fs = free_space_gain_db(los.distance_m, tc.tech.carrier_ghz);
  for (const auto& r : los.rays) CHECK(r.path_gain_db <= fs + 1e-12);
  CHECK(los.rays[1].path_gain_db == doctest::Approx(los.rays[0].path_gain_db - tc.rays.scatter_extra_loss_db));

  const auto again = generate_rays(at, bs, 1.5, tc, true, b);
  for (std::size_t i = 0; i < los.rays.size(); ++i) {
    CHECK(again.rays[i].path_gain_db == los.rays[i].path_gain_db);
    CHECK(again.rays[i].aoa_az_deg == los.rays[i].aoa_az_deg);
  }

  Rng c(7);
  const auto nlos = generate_rays(at, bs, 1.5, tc, false, c);
  CHECK(std::none_of(nlos.rays.begin(), nlos.rays.end(), [](const Ray& r) { return r.los; }));
  // Total NLOS power equals the NLOS path gain.
  CHECK(received_power_dbm(nlos, 0, 0) ==
        doctest::Approx(-path_loss_db(nlos.distance_m, 28, false, tc.path_loss)));
}

TEST_CASE("blockage sampling") {
  BlockageParams p;
  Rng rng(1);
  CHECK(sample_blockage(rng, p).regions.size() == 41);
  p.k_nsb = 0;
  p.self_blocking = false;
  CHECK(sample_blockage(rng, p).regions.empty());

  BlockageParams q;
  Rng r1(9), r2(9);
  const auto s1 = sample_blockage(r1, q);
  const auto s2 = sample_blockage(r2, q);
  for (std::size_t i = 0; i < s1.regions.size(); ++i) {
    CHECK(s1.regions[i].az_center_deg == s2.regions[i].az_center_deg);
    CHECK(s1.regions[i].az_spread_deg == s2.regions[i].az_spread_deg);
    CHECK(s1.regions[i].az_spread_deg > 0);
    CHECK(s1.regions[i].el_spread_deg > 0);
  }
}

TEST_CASE("blockage attenuation") {
  const BlockageParams p;
  const BlockageRegion self{180.0, 120.0, 0.0, 90.0, true};
  const BlockageRegion nsb{180.0, 30.0, 0.0, 10.0, false};

  // Heading +x, so the self region covers azimuths around 180.
  const auto ray = one_ray(-80, 180, 0);
  CHECK(apply_blockage(ray, {}, p).rays[0].path_gain_db == -80);
  CHECK(apply_blockage(ray, {{self}}, p).rays[0].path_gain_db == -110);
  CHECK(apply_blockage(ray, {{nsb}}, p).rays[0].path_gain_db == -100);
  CHECK(apply_blockage(ray, {{self, nsb}}, p).rays[0].path_gain_db == -110);
  // Outside every region.
  CHECK(apply_blockage(one_ray(-80, 0, 0), {{self, nsb}}, p).rays[0].path_gain_db == -80);
  // Self region turns with the wearer.
  CHECK(apply_blockage(one_ray(-80, 0, 0, 180), {{self}}, p).rays[0].path_gain_db == -110);

  // Adding regions or attenuation never raises a gain.
  Rng rng(3);
  std::uniform_real_distribution<double> az(0, 360), el(-30, 30), att(0, 40);
  for (int trial = 0; trial < 200; ++trial) {
    RaySet rays;
    for (int i = 0; i < 6; ++i) rays.rays.push_back(one_ray(-70 - i, az(rng), el(rng)).rays[0]);
    Rng srng(trial);
    auto state = sample_blockage(srng, p);
    BlockageParams stronger = p;
    stronger.nsb_attenuation_db = p.nsb_attenuation_db + att(rng);
    const auto base = apply_blockage(rays, state, p);
    const auto harder = apply_blockage(rays, state, stronger);
    auto more = state;
    more.regions.push_back({az(rng), 40.0, 0.0, 40.0, false});
    const auto extra = apply_blockage(rays, more, p);
    for (std::size_t i = 0; i < rays.rays.size(); ++i) {
      CHECK(base.rays[i].path_gain_db <= rays.rays[i].path_gain_db);
      CHECK(harder.rays[i].path_gain_db <= base.rays[i].path_gain_db);
      CHECK(extra.rays[i].path_gain_db <= base.rays[i].path_gain_db);
    }
  }
}

TEST_CASE("noise and SINR") {
  CHECK(noise_power_dbm(100e6, 5) == doctest::Approx(-89.0));
  CHECK(noise_power_dbm(10e6, 5) == doctest::Approx(-99.0));

  const LinkBudget b{0.0, 5.0, 0.0, 100e6, 0.25};
  const auto s = one_ray(-60, 0, 0);
  CHECK(*compute_sinr(s, {}, b) == doctest::Approx(29.0));
  CHECK_FALSE(compute_sinr(RaySet{}, {}, b).has_value());
  CHECK_FALSE(compute_sinr(one_ray(-125, 0, 0), {}, b).has_value());

  // One interferer at -95 dBm with activity factor 0.25.
  const std::vector<RaySet> other{one_ray(-95, 0, 0)};
  const double i_lin = 0.25 * std::pow(10, -9.5);
  const double n_lin = std::pow(10, -8.9);
  CHECK(*compute_sinr(s, other, b) == doctest::Approx(-60 - 10 * std::log10(n_lin + i_lin)));
}

TEST_CASE("trace synthesis") {
  const auto cfg = small_scenario(5);
  const auto t1 = synthesize_trace(cfg);
  const auto t2 = synthesize_trace(cfg);
  CHECK(t1 == t2);
  CHECK(synthesize_trace(small_scenario(6)) != t1);
  for (std::size_t i = 1; i < t1.samples.size(); ++i) CHECK(t1.samples[i - 1].t <= t1.samples[i].t);

  // Blockage epochs every 100 ms within the horizon.
  std::set<std::int64_t> instants;
  for (const auto& s : t1.samples) instants.insert(s.t.count());
  for (std::int64_t t = 0; t < t1.horizon.count(); t += 100'000) CHECK(instants.count(t) == 1);

  // Blockage never raises SINR relative to the same draw without it.
  const auto clear = synthesize_trace_unblocked(cfg);
  std::map<std::tuple<std::int64_t, int, TechKind>, std::optional<double>> ref;
  for (const auto& s : clear.samples) ref[{s.t.count(), s.bs_id, s.tech}] = s.sinr_db;
  int compared = 0;
  for (const auto& s : t1.samples) {
    auto it = ref.find({s.t.count(), s.bs_id, s.tech});
    if (it == ref.end()) continue;
    ++compared;
    const double blocked = s.sinr_db.value_or(-INFINITY);
    const double free = it->second.value_or(-INFINITY);
    CHECK(blocked <= free);
    if (s.tech == TechKind::LTE) CHECK(blocked == free);
  }
  CHECK(compared > 50);
}

TEST_CASE("trace round trip") {
  const auto dir = mecsim::testing::temp_dir("trace");
  const auto t = synthesize_trace(small_scenario(11));
  export_trace(t, dir / "t.csv");
  CHECK(import_trace(dir / "t.csv") == t);

  const auto fx = import_trace(std::filesystem::path(MECSIM_SOURCE_DIR) / "tests/fixtures/trace_small.csv");
  REQUIRE(fx.samples.size() == 3);
  CHECK(fx.samples[0] == TraceSample{Micros{0}, 1, TechKind::MMWAVE, 21.5, std::nullopt});
  CHECK_FALSE(fx.samples[1].sinr_db.has_value());
  CHECK(fx.samples[2] == TraceSample{Micros{200'000}, 2, TechKind::LTE, -3.25, std::nullopt});

  {
    std::ofstream bad(dir / "bad.csv");
    bad << "t_s,bs_id,tech,sinr_db\n0.0,1,lte,3\n0.1,1,lte\n";
  }
  try {
    import_trace(dir / "bad.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  {
    std::ofstream bad(dir / "unsorted.csv");
    bad << "t_s,bs_id,tech,sinr_db\n0.2,1,lte,3\n0.1,1,lte,4\n";
  }
  CHECK_THROWS_AS(import_trace(dir / "unsorted.csv"), ParseError);
  {
    std::ofstream rate(dir / "rate.csv");
    rate << "t_s,bs_id,tech,rate_mbps\n0.0,1,mmwave,120\n";
  }
  CHECK(import_trace(dir / "rate.csv").samples[0].rate_bps == 120e6);
}
