#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "carbonledger/indicators.hpp"
#include "carbonledger/ledger.hpp"
#include "carbonledger/panel.hpp"
#include "carbonledger/scenario.hpp"
#include "json.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
  return std::string(TEST_DATA_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct Fixture {
  carbonledger::CountryPanel panel;
  carbonledger::GlobalScenarios scenarios;
  double z = 0.0;
  nlohmann::json expected;
};

// Loads the shared world fixture once per test binary.
inline const Fixture& fixture() {
  static const Fixture fx = [] {
    Fixture f;
    {
      std::ifstream in(data_path("world_panel.csv"));
      REQUIRE(in.good());
      f.panel = carbonledger::load_panel(in);
    }
    {
      std::ifstream in(data_path("aim_scenarios.csv"));
      REQUIRE(in.good());
      auto curves = carbonledger::load_scenarios(in);
      f.scenarios = carbonledger::make_global_scenarios(curves, 30000.0);
    }
    {
      std::ifstream in(data_path("expected.json"));
      REQUIRE(in.good());
      in >> f.expected;
    }
    f.z = 0.28512;
    return f;
  }();
  return fx;
}

// Relative closeness matching the oracle file's 1e-9 contract.
inline bool close_rel(double a, double b, double tol = 1e-9) {
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

inline bool within_pct(double actual, double target, double pct) {
  return std::abs(actual - target) <= std::abs(target) * (pct / 100.0);
}

}  // namespace testutil
