#pragma once

#include <array>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "csv.hpp"
#include "types.hpp"

namespace carbonledger {

// Per-gas emissions, MtCO2e after ingestion.
struct GasInventory {
  std::optional<double> co2;
  std::optional<double> ch4;
  std::optional<double> nox;
  std::optional<double> hps;  // HFC + PFC + SF6

  // Sum of present components; missing only when all four are missing.
  std::optional<double> total() const {
    if (!co2 && !ch4 && !nox && !hps) return std::nullopt;
    return co2.value_or(0.0) + ch4.value_or(0.0) + nox.value_or(0.0) + hps.value_or(0.0);
  }

  bool operator==(const GasInventory&) const = default;
};

struct CountryObservation {
  std::optional<double> gdp_ppp;     // $B, purchasing power parity
  std::optional<double> population;  // persons
  std::optional<double> ihdi;        // 0..10000 scale
  GasInventory emissions;
  std::optional<double> landuse_em;  // MtCO2e, never part of total_emissions

  std::optional<double> total_emissions() const { return emissions.total(); }

  bool operator==(const CountryObservation&) const = default;
};

// Multipliers applied at ingestion when gas columns carry native masses
// instead of CO2-equivalents. Defaults leave values untouched.
struct GwpTable {
  double co2 = 1.0;
  double ch4 = 1.0;
  double nox = 1.0;
  double hps = 1.0;
};

struct CountryPanel {
  std::map<std::string, CountryId> countries;  // keyed by code
  std::map<std::pair<std::string, Year>, CountryObservation> observations;
  Year snapshot_year = 1990;
  Year normalization_year = 1990;

  const CountryObservation* find(const std::string& code, Year y) const {
    auto it = observations.find({code, y});
    return it == observations.end() ? nullptr : &it->second;
  }

  std::optional<double> snapshot_population(const std::string& code) const {
    if (const auto* o = find(code, snapshot_year)) return o->population;
    return std::nullopt;
  }

  bool has_year(Year y) const {
    for (const auto& [key, obs] : observations)
      if (key.second == y) return true;
    return false;
  }

  std::set<Year> years() const {
    std::set<Year> ys;
    for (const auto& [key, obs] : observations) ys.insert(key.second);
    return ys;
  }

  bool operator==(const CountryPanel&) const = default;
};

namespace detail {
inline const std::array<const char*, 10> kPanelHeader = {
    "country",      "year",         "gdp_ppp_busd", "population",  "ihdi",
    "co2_mtco2e",   "ch4_mtco2e",   "nox_mtco2e",   "hps_mtco2e",  "landuse_mtco2e"};

inline std::optional<double> field_value(const std::vector<std::string>& row, size_t i,
                                         const char* what, long rowno) {
  auto v = csv::parse_number(row[i]);
  if (v && *v < 0.0)
    throw Error(Errc::NegativeQuantity,
                std::string(what) + " is negative at row " + std::to_string(rowno), rowno);
  return v;
}
}  // namespace detail

// gas,gwp rows; recognized names: co2, ch4, n2o (alias nox), hps.
inline GwpTable load_gwp(std::istream& in) {
  GwpTable t;
  auto rows = csv::read(in);
  if (rows.empty() || rows[0].size() != 2 || rows[0][0] != "gas" || rows[0][1] != "gwp")
    throw Error(Errc::MalformedHeader, "GWP file must start with header gas,gwp", 1);
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 2)
      throw Error(Errc::MalformedRow, "GWP row must have 2 fields", static_cast<long>(i + 1));
    auto v = csv::parse_number(rows[i][1]);
    if (!v)
      throw Error(Errc::MalformedRow, "unparseable GWP value", static_cast<long>(i + 1));
    if (*v < 0.0)
      throw Error(Errc::NegativeQuantity, "GWP value is negative", static_cast<long>(i + 1));
    const std::string& gas = rows[i][0];
    if (gas == "co2")
      t.co2 = *v;
    else if (gas == "ch4")
      t.ch4 = *v;
    else if (gas == "n2o" || gas == "nox")
      t.nox = *v;
    else if (gas == "hps")
      t.hps = *v;
    else
      throw Error(Errc::MalformedRow, "unknown gas name: " + gas, static_cast<long>(i + 1));
  }
  return t;
}

// Unparseable numeric cells become missing values; structural problems
// (header, row shape, key fields, duplicates, negatives) are hard errors
// carrying 1-based row numbers.
inline CountryPanel load_panel(std::istream& in, const GwpTable* gwp = nullptr,
                               Year snapshot_year = 1990, Year normalization_year = 1990) {
  CountryPanel panel;
  panel.snapshot_year = snapshot_year;
  panel.normalization_year = normalization_year;

  auto rows = csv::read(in);
  if (rows.empty())
    throw Error(Errc::MalformedHeader, "panel file is empty", 1);
  if (rows[0].size() != detail::kPanelHeader.size())
    throw Error(Errc::MalformedHeader, "panel header must have 10 columns", 1);
  for (size_t i = 0; i < detail::kPanelHeader.size(); ++i)
    if (std::string(csv::trim(rows[0][i])) != detail::kPanelHeader[i])
      throw Error(Errc::MalformedHeader,
                  "unexpected panel column '" + rows[0][i] + "', want '" +
                      detail::kPanelHeader[i] + "'",
                  1);

  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const long rowno = static_cast<long>(i + 1);
    if (row.size() != detail::kPanelHeader.size())
      throw Error(Errc::MalformedRow, "panel row must have 10 fields", rowno);

    std::string code(csv::trim(row[0]));
    if (code.empty())
      throw Error(Errc::MalformedRow, "country code is empty", rowno);
    auto year = csv::parse_integer(row[1]);
    if (!year || !year_in_range(static_cast<Year>(*year)))
      throw Error(Errc::MalformedRow, "year must be an integer in [1900, 2200]", rowno);
    Year y = static_cast<Year>(*year);

    CountryObservation obs;
    obs.gdp_ppp = detail::field_value(row, 2, "gdp_ppp_busd", rowno);
    obs.population = detail::field_value(row, 3, "population", rowno);
    obs.ihdi = detail::field_value(row, 4, "ihdi", rowno);
    if (obs.ihdi && *obs.ihdi > 10000.0)
      throw Error(Errc::MalformedRow, "ihdi exceeds the 0..10000 scale", rowno);
    obs.emissions.co2 = detail::field_value(row, 5, "co2_mtco2e", rowno);
    obs.emissions.ch4 = detail::field_value(row, 6, "ch4_mtco2e", rowno);
    obs.emissions.nox = detail::field_value(row, 7, "nox_mtco2e", rowno);
    obs.emissions.hps = detail::field_value(row, 8, "hps_mtco2e", rowno);
    obs.landuse_em = detail::field_value(row, 9, "landuse_mtco2e", rowno);

    if (gwp) {
      if (obs.emissions.co2) *obs.emissions.co2 *= gwp->co2;
      if (obs.emissions.ch4) *obs.emissions.ch4 *= gwp->ch4;
      if (obs.emissions.nox) *obs.emissions.nox *= gwp->nox;
      if (obs.emissions.hps) *obs.emissions.hps *= gwp->hps;
    }

    if (!panel.observations.emplace(std::make_pair(code, y), obs).second)
      throw Error(Errc::DuplicateObservation,
                  "duplicate observation for " + code + " " + std::to_string(y) +
                      " at row " + std::to_string(rowno),
                  rowno);
    panel.countries.try_emplace(code, CountryId{code, code});
  }
  return panel;
}

inline void write_panel(std::ostream& out, const CountryPanel& panel) {
  for (size_t i = 0; i < detail::kPanelHeader.size(); ++i)
    out << (i ? "," : "") << detail::kPanelHeader[i];
  out << '\n';
  auto cell = [](const std::optional<double>& v) {
    return v ? csv::format_number(*v) : std::string();
  };
  for (const auto& [key, o] : panel.observations) {
    out << csv::escape(key.first) << ',' << key.second << ',' << cell(o.gdp_ppp) << ','
        << cell(o.population) << ',' << cell(o.ihdi) << ',' << cell(o.emissions.co2) << ','
        << cell(o.emissions.ch4) << ',' << cell(o.emissions.nox) << ','
        << cell(o.emissions.hps) << ',' << cell(o.landuse_em) << '\n';
  }
}

struct WorldAggregate {
  double total_em = 0.0;  // MtCO2e, skip-missing sum
  int counted = 0;
  int skipped = 0;  // countries present in the year with missing total emissions
};

inline WorldAggregate aggregate_world(const CountryPanel& panel, Year year) {
  WorldAggregate agg;
  bool seen = false;
  for (const auto& [key, obs] : panel.observations) {
    if (key.second != year) continue;
    seen = true;
    if (auto em = obs.total_emissions()) {
      agg.total_em += *em;
      ++agg.counted;
    } else {
      ++agg.skipped;
    }
  }
  if (!seen)
    throw Error(Errc::EmptyYear, "no observations for year " + std::to_string(year));
  return agg;
}

}  // namespace carbonledger
