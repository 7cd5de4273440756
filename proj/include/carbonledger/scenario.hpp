#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "csv.hpp"
#include "types.hpp"

namespace carbonledger {

// Piecewise-linear emission series over strictly increasing integer years.
// Queries outside the covered span clamp to the nearest endpoint.
struct ScenarioCurve {
  std::string label;
  std::vector<std::pair<Year, double>> points;

  void validate() const {
    if (points.empty())
      throw Error(Errc::ScenarioInvariant, "curve '" + label + "' has no points");
    for (size_t i = 0; i < points.size(); ++i) {
      if (points[i].second < 0.0)
        throw Error(Errc::NegativeQuantity,
                    "curve '" + label + "' has a negative value at year " +
                        std::to_string(points[i].first));
      if (i && points[i].first <= points[i - 1].first)
        throw Error(Errc::ScenarioInvariant,
                    "curve '" + label + "' years must be strictly increasing");
    }
  }

  bool covers(Year y) const {
    return !points.empty() && y >= points.front().first && y <= points.back().first;
  }

  double value_at(double year) const {
    if (points.empty())
      throw Error(Errc::ScenarioInvariant, "curve '" + label + "' has no points");
    if (year <= points.front().first) return points.front().second;
    if (year >= points.back().first) return points.back().second;
    for (size_t i = 1; i < points.size(); ++i) {
      if (year > points[i].first) continue;
      const auto& [y0, v0] = points[i - 1];
      const auto& [y1, v1] = points[i];
      if (year == static_cast<double>(y1)) return v1;
      return v0 + (v1 - v0) * (year - y0) / (y1 - y0);
    }
    return points.back().second;
  }
};

// label,year,value_mtco2e rows, any order; grouped by label and sorted.
inline std::map<std::string, ScenarioCurve> load_scenarios(std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty() || rows[0].size() != 3 || std::string(csv::trim(rows[0][0])) != "label" ||
      std::string(csv::trim(rows[0][1])) != "year" ||
      std::string(csv::trim(rows[0][2])) != "value_mtco2e")
    throw Error(Errc::MalformedHeader, "scenario file must start with label,year,value_mtco2e", 1);

  std::map<std::string, ScenarioCurve> curves;
  for (size_t i = 1; i < rows.size(); ++i) {
    const long rowno = static_cast<long>(i + 1);
    if (rows[i].size() != 3)
      throw Error(Errc::MalformedRow, "scenario row must have 3 fields", rowno);
    std::string label(csv::trim(rows[i][0]));
    if (label.empty())
      throw Error(Errc::MalformedRow, "scenario label is empty", rowno);
    auto year = csv::parse_integer(rows[i][1]);
    if (!year || !year_in_range(static_cast<Year>(*year)))
      throw Error(Errc::MalformedRow, "year must be an integer in [1900, 2200]", rowno);
    auto value = csv::parse_number(rows[i][2]);
    if (!value)
      throw Error(Errc::MalformedRow, "unparseable scenario value", rowno);
    if (*value < 0.0)
      throw Error(Errc::NegativeQuantity, "scenario value is negative", rowno);

    auto& curve = curves[label];
    curve.label = label;
    Year y = static_cast<Year>(*year);
    for (const auto& pt : curve.points)
      if (pt.first == y)
        throw Error(Errc::DuplicateObservation,
                    "duplicate year " + std::to_string(y) + " for curve '" + label + "'", rowno);
    curve.points.emplace_back(y, *value);
  }
  for (auto& [label, curve] : curves) {
    std::sort(curve.points.begin(), curve.points.end());
    curve.validate();
  }
  return curves;
}

namespace detail {
inline ScenarioCurve build_limit(const ScenarioCurve& raw, double em_world_1990,
                                 const std::string& label) {
  double base = 0.0;
  bool found = false;
  for (const auto& [y, v] : raw.points)
    if (y == 1990) {
      base = v;
      found = true;
    }
  if (!found)
    throw Error(Errc::MissingBaseYear,
                "curve '" + raw.label + "' has no 1990 value to anchor " + label);
  ScenarioCurve out;
  out.label = label;
  for (const auto& [y, v] : raw.points) {
    double lim = em_world_1990 + 2.0 * (v - base);
    if (lim < 0.0)
      throw Error(Errc::NegativeQuantity,
                  label + " would be negative at year " + std::to_string(y));
    out.points.emplace_back(y, lim);
  }
  out.validate();
  return out;
}
}  // namespace detail

// Green limit: world 1990 emissions shifted by twice the raw series' change
// from its own 1990 value.
inline ScenarioCurve build_green_limit(const ScenarioCurve& raw, double em_world_1990) {
  return detail::build_limit(raw, em_world_1990, "GB1");
}

inline ScenarioCurve build_red_limit(const ScenarioCurve& raw, double em_world_1990) {
  return detail::build_limit(raw, em_world_1990, "RA1B");
}

struct GlobalScenarios {
  ScenarioCurve green;  // GB1
  ScenarioCurve red;    // RA1B
  double em_world_1990 = 0.0;
};

// Accepts either prebuilt GB1/RA1B curves or raw B1_AIM_CO2/A1B_AIM_CO2
// series to expand. Verifies that both limits start from the world 1990
// total and that the red limit never dips below the green one.
inline GlobalScenarios make_global_scenarios(const std::map<std::string, ScenarioCurve>& curves,
                                             double em_world_1990) {
  GlobalScenarios gs;
  auto g = curves.find("GB1");
  auto r = curves.find("RA1B");
  if (g != curves.end() && r != curves.end()) {
    gs.green = g->second;
    gs.red = r->second;
  } else {
    auto rawg = curves.find("B1_AIM_CO2");
    auto rawr = curves.find("A1B_AIM_CO2");
    if (rawg == curves.end() || rawr == curves.end())
      throw Error(Errc::MissingCurve,
                  "need curves GB1 and RA1B, or B1_AIM_CO2 and A1B_AIM_CO2");
    gs.green = build_green_limit(rawg->second, em_world_1990);
    gs.red = build_red_limit(rawr->second, em_world_1990);
  }
  gs.em_world_1990 = em_world_1990;

  const double tol = 1e-6 * (1.0 + std::abs(em_world_1990));
  if (std::abs(gs.green.value_at(1990) - em_world_1990) > tol ||
      std::abs(gs.red.value_at(1990) - em_world_1990) > tol)
    throw Error(Errc::ScenarioInvariant,
                "green and red limits must equal the world 1990 total at 1990");
  std::vector<Year> checkpoints;
  for (const auto& [y, v] : gs.green.points) checkpoints.push_back(y);
  for (const auto& [y, v] : gs.red.points) checkpoints.push_back(y);
  for (Year y : checkpoints)
    if (y >= 1990 && gs.red.value_at(y) < gs.green.value_at(y) - tol)
      throw Error(Errc::ScenarioInvariant,
                  "red limit falls below green limit at year " + std::to_string(y));
  return gs;
}

}  // namespace carbonledger
