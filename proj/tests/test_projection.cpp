#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "carbonledger/projection.hpp"
#include "helpers.hpp"

using namespace carbonledger;
using testutil::fixture;

static ProjectionConfig fixture_config() {
  ProjectionConfig cfg;
  cfg.tax_drag = 0.005;
  cfg.tax_abatement = 0.005;
  cfg.tech_rate = 0.011;
  cfg.red_bct = 100.0;
  cfg.global_floor = 0.0167;
  cfg.horizon_start = 2010;
  cfg.horizon_end = 2020;
  return cfg;
}

struct FixtureRun {
  std::map<std::string, GrowthProfile> growth;
  ProjectionState initial;
  std::vector<ProjectionState> ct;
  std::vector<ProjectionState> nc;
};

static const FixtureRun& fixture_run() {
  static const FixtureRun run = [] {
    const auto& fx = fixture();
    FixtureRun r;
    r.growth = growth_profiles(fx.panel, 2000, 2009, fx.z, 0.0167);
    r.initial = initial_state(fx.panel, 2009, fx.z, fx.scenarios, 100.0);
    auto cfg = fixture_config();
    r.ct = run_projection(r.initial, Mode::CT, r.growth, fx.scenarios, cfg);
    r.nc = run_projection(r.initial, Mode::NC, r.growth, fx.scenarios, cfg);
    return r;
  }();
  return run;
}

TEST_CASE("growth estimation: compound rate between endpoints") {
  auto flat = estimate_growth(100.0, 100.0, 9, 0.0);
  CHECK(flat.raw_rate == 0.0);
  CHECK(flat.effective_rate == 0.0);

  auto doubled = estimate_growth(100.0, 200.0, 9, 0.0);
  CHECK(testutil::close_rel(doubled.raw_rate, std::pow(2.0, 1.0 / 9.0) - 1.0, 1e-12));

  auto floored = estimate_growth(100.0, 100.0, 9, 0.0167);
  CHECK(floored.raw_rate == 0.0);
  CHECK(floored.effective_rate == 0.0167);

  auto shrinking = estimate_growth(200.0, 100.0, 9, 0.0167);
  CHECK(shrinking.raw_rate < 0.0);
  CHECK(shrinking.effective_rate == 0.0167);
}

TEST_CASE("growth estimation rejects unusable endpoints") {
  CHECK_THROWS_MATCHES(estimate_growth(100.0, 200.0, 0, 0.0), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::InvalidParameter;
                       }));
  for (auto bad : {std::optional<double>{}, std::optional<double>{0.0},
                   std::optional<double>{-5.0}}) {
    CHECK_THROWS_MATCHES(estimate_growth(bad, 200.0, 9, 0.0), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == Errc::MissingEndpoint;
                         }));
    CHECK_THROWS_MATCHES(estimate_growth(100.0, bad, 9, 0.0), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == Errc::MissingEndpoint;
                         }));
  }
}

TEST_CASE("fixture growth anchors and the global maximum") {
  const auto& run = fixture_run();
  const auto& fx = fixture();
  CHECK(testutil::close_rel(run.growth.at("China").raw_rate, 0.0435, 1e-9));
  CHECK(testutil::close_rel(run.growth.at("United States").raw_rate, -0.0249, 1e-9));
  CHECK(run.growth.at("United States").effective_rate == 0.0167);
  CHECK(testutil::close_rel(run.growth.at("Qatar").raw_rate, 0.0841, 1e-4));

  const auto& exp = fx.expected.at("growth");
  std::string argmax;
  double best = -1.0;
  for (const auto& [c, g] : run.growth) {
    CHECK(testutil::close_rel(g.raw_rate, exp.at(c).get<double>(), 1e-9));
    if (g.raw_rate > best) {
      best = g.raw_rate;
      argmax = c;
    }
  }
  CHECK(argmax == "Qatar");
  CHECK(run.growth.size() == exp.size());
}

TEST_CASE("projection config validation") {
  auto cfg = fixture_config();
  CHECK_NOTHROW(cfg.validate());
  for (auto* field : {&cfg.tax_drag, &cfg.tax_abatement, &cfg.tech_rate}) {
    auto saved = *field;
    *field = -0.1;
    CHECK_THROWS_MATCHES(cfg.validate(), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == Errc::InvalidParameter;
                         }));
    *field = 1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    *field = saved;
  }
  cfg = fixture_config();
  cfg.red_bct = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("single step applies the taxed growth and abatement factors") {
  // One country, rate 4.35 percent, previous tax 6.76:
  // activity factor 1.0435 * (1 - 0.005 * 6.76) = 1.0435 * 0.9662
  // intensity factor 1 - 0.005 * 6.76 - 0.011 = 0.9552
  ProjectionState s;
  s.year = 2009;
  s.countries["Solo"] = {1000.0, 2.0, 2000.0, 676, 6.76};
  s.world_ihdigdp = 1000.0;
  s.world_em = 2000.0;
  std::map<std::string, GrowthProfile> growth;
  growth["Solo"] = {0.0435, 0.0435};

  std::istringstream sc(
      "label,year,value_mtco2e\n"
      "GB1,1990,1500\nGB1,2020,1600\nRA1B,1990,1500\nRA1B,2020,1800\n");
  auto gs = make_global_scenarios(load_scenarios(sc), 1500.0);
  auto cfg = fixture_config();
  auto next = step_projection(s, Mode::CT, growth, gs, cfg);
  CHECK(next.year == 2010);
  const auto& cs = next.countries.at("Solo");
  CHECK(testutil::close_rel(cs.ihdigdp, 1000.0 * 1.0435 * (1.0 - 0.005 * 6.76), 1e-12));
  CHECK(testutil::close_rel(cs.mghg, 2.0 * (1.0 - 0.005 * 6.76 - 0.011), 1e-12));
  CHECK(testutil::close_rel(cs.em, cs.ihdigdp * cs.mghg, 1e-12));

  auto nc = step_projection(s, Mode::NC, growth, gs, cfg);
  const auto& ns = nc.countries.at("Solo");
  CHECK(testutil::close_rel(ns.ihdigdp, 1000.0 * 1.0435, 1e-12));
  CHECK(testutil::close_rel(ns.mghg, 2.0 * 0.989, 1e-12));
}

TEST_CASE("ten untaxed years compound the technology decline") {
  double m = 1.0;
  for (int i = 0; i < 10; ++i) m *= 1.0 - 0.011;
  CHECK(testutil::close_rel(m, std::pow(0.989, 10), 1e-12));
  CHECK(testutil::close_rel(m, 0.8953, 2e-4));
}

TEST_CASE("a crushing tax cannot push intensity below zero silently") {
  ProjectionState s;
  s.year = 2009;
  s.countries["Solo"] = {1000.0, 2.0, 2000.0, 30000, 300.0};
  s.world_ihdigdp = 1000.0;
  s.world_em = 2000.0;
  std::map<std::string, GrowthProfile> growth;
  growth["Solo"] = {0.02, 0.02};
  std::istringstream sc(
      "label,year,value_mtco2e\n"
      "GB1,1990,1500\nGB1,2020,1600\nRA1B,1990,1500\nRA1B,2020,1800\n");
  auto gs = make_global_scenarios(load_scenarios(sc), 1500.0);
  auto cfg = fixture_config();
  CHECK_THROWS_MATCHES(step_projection(s, Mode::CT, growth, gs, cfg), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::NegativeIntensity;
                       }));
}

TEST_CASE("initial state covers exactly the countries with activity data") {
  const auto& run = fixture_run();
  const auto& fx = fixture();
  CHECK(run.initial.year == 2009);
  CHECK(run.initial.countries.size() ==
        fx.expected.at("annual_2009").size());
  CHECK(testutil::close_rel(run.initial.world_em,
                            fx.expected.at("projection").at("ct_world_em").at("2009").get<double>(),
                            1e-6));
  const auto& china = run.initial.countries.at("China");
  CHECK(china.red == 676);
  CHECK(china.bct == 6.76);
  // Countries without 2009 emissions still contribute activity.
  const auto& afg = run.initial.countries.at("Afghanistan");
  CHECK(afg.em == 0.0);
  CHECK(afg.mghg == 0.0);
  CHECK(afg.bct == 0.0);
  CHECK(afg.ihdigdp > 0.0);
}

TEST_CASE("trajectories begin at the base year and step annually") {
  const auto& run = fixture_run();
  REQUIRE(run.ct.size() == 12);
  CHECK(run.ct.front().year == 2009);
  CHECK(run.ct.back().year == 2020);
  for (size_t i = 1; i < run.ct.size(); ++i)
    CHECK(run.ct[i].year == run.ct[i - 1].year + 1);
}

TEST_CASE("fixture projection matches the oracle world series") {
  const auto& run = fixture_run();
  const auto& exp = fixture().expected.at("projection");
  for (const auto& st : run.ct) {
    auto key = std::to_string(st.year);
    INFO("CT year " << key);
    CHECK(testutil::close_rel(st.world_em,
                              exp.at("ct_world_em").at(key).get<double>(), 1e-9));
    CHECK(testutil::close_rel(st.world_ihdigdp,
                              exp.at("ct_world_ihdigdp").at(key).get<double>(), 1e-9));
  }
  for (const auto& st : run.nc) {
    auto key = std::to_string(st.year);
    INFO("NC year " << key);
    CHECK(testutil::close_rel(st.world_em,
                              exp.at("nc_world_em").at(key).get<double>(), 1e-9));
  }
}

TEST_CASE("fixture projection matches the oracle tax paths") {
  const auto& run = fixture_run();
  const auto& exp = fixture().expected.at("projection").at("ct_bct");
  for (auto it = exp.begin(); it != exp.end(); ++it) {
    const std::string& country = it.key();
    for (const auto& st : run.ct) {
      auto key = std::to_string(st.year);
      INFO(country << " in " << key);
      REQUIRE(st.countries.count(country) == 1);
      CHECK(testutil::close_rel(st.countries.at(country).bct,
                                it.value().at(key).get<double>(), 1e-9));
    }
  }
}

TEST_CASE("fixture projection 2020 sample states") {
  const auto& run = fixture_run();
  const auto& exp = fixture().expected.at("projection").at("ct_2020_sample");
  const auto& last = run.ct.back();
  for (auto it = exp.begin(); it != exp.end(); ++it) {
    const auto& cs = last.countries.at(it.key());
    INFO(it.key());
    CHECK(testutil::close_rel(cs.ihdigdp, it.value().at("ihdigdp").get<double>(), 1e-9));
    CHECK(testutil::close_rel(cs.mghg, it.value().at("mghg").get<double>(), 1e-9));
    CHECK(testutil::close_rel(cs.em, it.value().at("em").get<double>(), 1e-9));
    CHECK(testutil::close_rel(cs.bct, it.value().at("bct").get<double>(), 1e-9));
  }
}

TEST_CASE("every projected emission equals activity times intensity") {
  const auto& run = fixture_run();
  for (const auto* traj : {&run.ct, &run.nc})
    for (const auto& st : *traj)
      for (const auto& [c, cs] : st.countries) {
        if (st.year == run.initial.year) {
          // The base year keeps the observed emission; the derived
          // intensity reproduces it only up to rounding.
          REQUIRE(testutil::close_rel(cs.em, cs.ihdigdp * cs.mghg, 1e-12));
        } else {
          REQUIRE(cs.em == cs.ihdigdp * cs.mghg);
        }
      }
}

TEST_CASE("taxed world emissions never exceed untaxed world emissions") {
  const auto& run = fixture_run();
  REQUIRE(run.ct.size() == run.nc.size());
  for (size_t i = 0; i < run.ct.size(); ++i)
    CHECK(run.ct[i].world_em <= run.nc[i].world_em + 1e-9);
}

TEST_CASE("an empty horizon echoes the initial state") {
  const auto& run = fixture_run();
  const auto& fx = fixture();
  auto cfg = fixture_config();
  cfg.horizon_start = 2010;
  cfg.horizon_end = 2009;
  auto traj = run_projection(run.initial, Mode::CT, run.growth, fx.scenarios, cfg);
  REQUIRE(traj.size() == 1);
  CHECK(traj[0].year == 2009);
  CHECK(traj[0].world_em == run.initial.world_em);
}

TEST_CASE("the horizon must start the year after the base state") {
  const auto& run = fixture_run();
  const auto& fx = fixture();
  auto cfg = fixture_config();
  cfg.horizon_start = 2012;
  CHECK_THROWS_MATCHES(
      run_projection(run.initial, Mode::CT, run.growth, fx.scenarios, cfg), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.code() == Errc::InvalidParameter;
      }));
}

TEST_CASE("projection is deterministic bit for bit") {
  const auto& run = fixture_run();
  const auto& fx = fixture();
  auto cfg = fixture_config();
  auto again = run_projection(run.initial, Mode::CT, run.growth, fx.scenarios, cfg);
  REQUIRE(again.size() == run.ct.size());
  for (size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].world_em == run.ct[i].world_em);
    for (const auto& [c, cs] : again[i].countries) {
      const auto& base = run.ct[i].countries.at(c);
      CHECK(cs.ihdigdp == base.ihdigdp);
      CHECK(cs.mghg == base.mghg);
      CHECK(cs.em == base.em);
    }
  }
}

TEST_CASE("zero tax and zero technology rates reduce to compound growth") {
  const auto& run = fixture_run();
  const auto& fx = fixture();
  auto cfg = fixture_config();
  cfg.tax_drag = 0.0;
  cfg.tax_abatement = 0.0;
  cfg.tech_rate = 0.0;
  auto traj = run_projection(run.initial, Mode::CT, run.growth, fx.scenarios, cfg);
  const auto& last = traj.back();
  int n = last.year - run.initial.year;
  for (const auto& [c, cs] : last.countries) {
    const auto& base = run.initial.countries.at(c);
    double factor = std::pow(1.0 + run.growth.at(c).effective_rate, n);
    REQUIRE(testutil::close_rel(cs.ihdigdp, base.ihdigdp * factor, 1e-12));
    REQUIRE(testutil::close_rel(cs.em, base.em * factor, 1e-12));
  }
}

TEST_CASE("raising the tax abatement never raises projected emissions") {
  const auto& run = fixture_run();
  const auto& fx = fixture();
  auto low = fixture_config();
  low.tax_abatement = 0.002;
  auto high = fixture_config();
  high.tax_abatement = 0.008;
  auto tl = run_projection(run.initial, Mode::CT, run.growth, fx.scenarios, low);
  auto th = run_projection(run.initial, Mode::CT, run.growth, fx.scenarios, high);
  for (size_t i = 0; i < tl.size(); ++i)
    CHECK(th[i].world_em <= tl[i].world_em + 1e-9);
}

TEST_CASE("taxed emissions stay below untaxed across randomized economies") {
  std::mt19937 rng(81904);
  std::istringstream sc(
      "label,year,value_mtco2e\n"
      "GB1,1990,1000\nGB1,2030,1200\nRA1B,1990,1000\nRA1B,2030,1500\n");
  auto gs = make_global_scenarios(load_scenarios(sc), 1000.0);
  for (int trial = 0; trial < 25; ++trial) {
    ProjectionState s;
    s.year = 2009;
    std::map<std::string, GrowthProfile> growth;
    int n = 2 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      std::string name = "C" + std::to_string(i);
      double act = 50.0 + static_cast<double>(rng() % 1000);
      double mghg = 0.3 + static_cast<double>(rng() % 30) / 10.0;
      CountryState cs;
      cs.ihdigdp = act;
      cs.mghg = mghg;
      cs.em = act * mghg;
      cs.red = static_cast<long long>(rng() % 900);
      cs.bct = static_cast<double>(cs.red) / 100.0;
      s.countries[name] = cs;
      s.world_ihdigdp += cs.ihdigdp;
      s.world_em += cs.em;
      double rate = -0.01 + static_cast<double>(rng() % 60) / 1000.0;
      growth[name] = {rate, std::max(rate, 0.0167)};
    }
    ProjectionConfig cfg = fixture_config();
    cfg.horizon_start = 2010;
    cfg.horizon_end = 2020;
    auto ct = run_projection(s, Mode::CT, growth, gs, cfg);
    auto nc = run_projection(s, Mode::NC, growth, gs, cfg);
    for (size_t i = 0; i < ct.size(); ++i)
      REQUIRE(ct[i].world_em <= nc[i].world_em + 1e-9);
  }
}
