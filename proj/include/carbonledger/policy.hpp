#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ledger.hpp"
#include "panel.hpp"
#include "scenario.hpp"
#include "types.hpp"

namespace carbonledger {

// Border tax rates in percent, full precision; display rounding is separate.
struct TaxSchedule {
  Year year = 0;
  double red_bct = 100.0;
  std::map<std::string, double> bct;
};

inline double bct_rate(long long red_pct, double red_bct) {
  if (red_bct <= 0.0)
    throw Error(Errc::InvalidParameter, "red_bct divisor must be positive");
  return static_cast<double>(red_pct) / red_bct;
}

// One-decimal display computed in integer space so values like 1235/100
// render as 12.4 rather than tripping on binary 12.349999...
inline std::string format_bct_display(long long red_pct, double red_bct) {
  if (red_bct <= 0.0)
    throw Error(Errc::InvalidParameter, "red_bct divisor must be positive");
  long long tenths;
  long long d = std::llround(red_bct);
  if (static_cast<double>(d) == red_bct && d > 0)
    tenths = (red_pct * 10 + d / 2) / d;
  else
    tenths = std::llround(10.0 * static_cast<double>(red_pct) / red_bct);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

inline std::string format_one_decimal(double v) {
  long long tenths = std::llround(v * 10.0);
  std::string sign = tenths < 0 ? "-" : "";
  if (tenths < 0) tenths = -tenths;
  return sign + std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

inline TaxSchedule tax_schedule(const std::vector<LedgerRow>& rows, double red_bct) {
  if (red_bct <= 0.0)
    throw Error(Errc::InvalidParameter, "red_bct divisor must be positive");
  TaxSchedule schedule;
  schedule.red_bct = red_bct;
  for (const auto& row : rows) {
    schedule.year = row.year;
    if (row.red_pct) schedule.bct[row.country] = bct_rate(*row.red_pct, red_bct);
  }
  return schedule;
}

// Importer-side tariff on the exporter's goods, clamped at zero.
inline double differential_bct(const TaxSchedule& schedule, const std::string& importer,
                               const std::string& exporter) {
  auto imp = schedule.bct.find(importer);
  if (imp == schedule.bct.end())
    throw Error(Errc::UnknownCountry, "importer '" + importer + "' not in tax schedule");
  auto exp = schedule.bct.find(exporter);
  if (exp == schedule.bct.end())
    throw Error(Errc::UnknownCountry, "exporter '" + exporter + "' not in tax schedule");
  double diff = exp->second - imp->second;
  return diff > 0.0 ? diff : 0.0;
}

struct WorldEtsSummary {
  double world_em = 0.0;       // MtCO2e, all reporting countries
  double green_limit = 0.0;    // MtCO2e
  double red_limit = 0.0;      // MtCO2e
  double total_allowed = 0.0;  // == green_limit
  double total_debt = 0.0;     // MtCO2e
  double total_credit = 0.0;   // MtCO2e
  double unrecoverable_debt = 0.0;
};

inline WorldEtsSummary world_summary(const CountryPanel& panel, Year year,
                                     const std::vector<LedgerRow>& rows,
                                     const GlobalScenarios& scenarios) {
  WorldEtsSummary s;
  s.world_em = aggregate_world(panel, year).total_em;
  s.green_limit = scenarios.green.value_at(year);
  s.red_limit = scenarios.red.value_at(year);
  s.total_allowed = s.green_limit;
  for (const auto& row : rows) {
    if (row.debt) s.total_debt += *row.debt;
    if (row.credit) s.total_credit += *row.credit;
  }
  s.unrecoverable_debt = std::max(0.0, s.total_debt - s.total_credit);
  return s;
}

struct EtsPosition {
  std::string country;
  double credit = 0.0;        // MtCO2e available to sell
  double debt = 0.0;          // MtCO2e emission debt
  double landuse_debt = 0.0;  // MtCO2e land-use debt, must clear first
  double cleared = 0.0;       // MtCO2e of credits this country has bought
};

struct Transfer {
  std::string seller;
  std::string buyer;
  double amount = 0.0;  // MtCO2e
  enum class Target { Landuse, Emission } target = Target::Emission;
};

// Seeds trading positions from a ledger: emission credit/debt from the rows,
// land-use debt one-for-one from the year's land-use emissions.
inline std::map<std::string, EtsPosition> positions_from_ledger(
    const std::vector<LedgerRow>& rows, const CountryPanel& panel, Year year) {
  std::map<std::string, EtsPosition> positions;
  for (const auto& row : rows) {
    EtsPosition p;
    p.country = row.country;
    p.credit = row.credit.value_or(0.0);
    p.debt = row.debt.value_or(0.0);
    if (const auto* obs = panel.find(row.country, year))
      p.landuse_debt = obs->landuse_em.value_or(0.0);
    positions.emplace(p.country, p);
  }
  return positions;
}

// Applies transfers strictly in order, fail-fast. A transfer may clear
// land-use debt or emission debt; emission-debt purchases are rejected while
// the buyer still owes land-use debt. Credits move from seller to the
// buyer's cleared tally, so total credit plus cleared is conserved.
inline std::map<std::string, EtsPosition> ets_clear(std::map<std::string, EtsPosition> positions,
                                                    const std::vector<Transfer>& transfers) {
  for (size_t i = 0; i < transfers.size(); ++i) {
    const Transfer& t = transfers[i];
    const long idx = static_cast<long>(i);
    if (t.amount <= 0.0)
      throw Error(Errc::NegativeQuantity,
                  "transfer " + std::to_string(i) + " amount must be positive", -1, idx);
    auto seller = positions.find(t.seller);
    if (seller == positions.end())
      throw Error(Errc::UnknownCountry,
                  "transfer " + std::to_string(i) + ": unknown seller '" + t.seller + "'", -1,
                  idx);
    auto buyer = positions.find(t.buyer);
    if (buyer == positions.end())
      throw Error(Errc::UnknownCountry,
                  "transfer " + std::to_string(i) + ": unknown buyer '" + t.buyer + "'", -1,
                  idx);
    if (seller->second.credit < t.amount)
      throw Error(Errc::InsufficientCredit,
                  "transfer " + std::to_string(i) + ": seller '" + t.seller +
                      "' holds insufficient credit",
                  -1, idx);
    if (t.target == Transfer::Target::Emission && buyer->second.landuse_debt > 0.0)
      throw Error(Errc::LandUseDebtOutstanding,
                  "transfer " + std::to_string(i) + ": buyer '" + t.buyer +
                      "' must clear land-use debt first",
                  -1, idx);
    seller->second.credit -= t.amount;
    buyer->second.cleared += t.amount;
    double& debt = t.target == Transfer::Target::Landuse ? buyer->second.landuse_debt
                                                         : buyer->second.debt;
    debt = std::max(0.0, debt - t.amount);
  }
  return positions;
}

// Rebuilds RED percentages from post-clearing debts; margins are untouched
// because they derive from admissible shares alone.
inline std::vector<LedgerRow> recompute_red(std::vector<LedgerRow> rows,
                                            const std::map<std::string, EtsPosition>& positions) {
  for (auto& row : rows) {
    auto it = positions.find(row.country);
    if (it == positions.end() || !row.debt) continue;
    row.debt = it->second.debt;
    row.red_pct = red_percentage(row.debt, row.margin);
  }
  return rows;
}

// seq,seller,buyer,amount_mtco2e,target rows, applied in seq order.
inline std::vector<Transfer> load_transfers(std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty() || rows[0].size() != 5 || std::string(csv::trim(rows[0][0])) != "seq" ||
      std::string(csv::trim(rows[0][1])) != "seller" ||
      std::string(csv::trim(rows[0][2])) != "buyer" ||
      std::string(csv::trim(rows[0][3])) != "amount_mtco2e" ||
      std::string(csv::trim(rows[0][4])) != "target")
    throw Error(Errc::MalformedHeader,
                "transfers file must start with seq,seller,buyer,amount_mtco2e,target", 1);
  std::vector<std::pair<long long, Transfer>> ordered;
  for (size_t i = 1; i < rows.size(); ++i) {
    const long rowno = static_cast<long>(i + 1);
    if (rows[i].size() != 5)
      throw Error(Errc::MalformedRow, "transfer row must have 5 fields", rowno);
    auto seq = csv::parse_integer(rows[i][0]);
    if (!seq)
      throw Error(Errc::MalformedRow, "unparseable transfer seq", rowno);
    Transfer t;
    t.seller = std::string(csv::trim(rows[i][1]));
    t.buyer = std::string(csv::trim(rows[i][2]));
    auto amount = csv::parse_number(rows[i][3]);
    if (!amount)
      throw Error(Errc::MalformedRow, "unparseable transfer amount", rowno);
    t.amount = *amount;
    std::string target(csv::trim(rows[i][4]));
    if (target == "landuse")
      t.target = Transfer::Target::Landuse;
    else if (target == "emission")
      t.target = Transfer::Target::Emission;
    else
      throw Error(Errc::MalformedRow, "transfer target must be landuse or emission", rowno);
    ordered.emplace_back(*seq, t);
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Transfer> transfers;
  transfers.reserve(ordered.size());
  for (auto& [seq, t] : ordered) transfers.push_back(std::move(t));
  return transfers;
}

}  // namespace carbonledger
