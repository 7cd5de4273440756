#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "indicators.hpp"
#include "panel.hpp"
#include "scenario.hpp"
#include "types.hpp"

namespace carbonledger {

struct LedgerRow {
  std::string country;
  Year year = 0;
  std::optional<double> admem;   // MtCO2e
  std::optional<double> credit;  // MtCO2e
  std::optional<double> debt;    // MtCO2e
  std::optional<double> margin;  // MtCO2e
  std::optional<long long> red_pct;
};

inline std::optional<double> admissible_emissions(std::optional<double> ihdigdp,
                                                  double world_ihdigdp, double green_limit) {
  if (!ihdigdp) return std::nullopt;
  if (world_ihdigdp <= 0.0)
    throw Error(Errc::DegenerateNormalization, "world IHDIGDP must be positive");
  return *ihdigdp / world_ihdigdp * green_limit;
}

// Complementary positive parts of admissible minus actual emissions.
inline std::pair<std::optional<double>, std::optional<double>> credit_debt(
    std::optional<double> em, std::optional<double> admem) {
  if (!em || !admem) return {std::nullopt, std::nullopt};
  double diff = *em - *admem;
  if (diff > 0.0) return {0.0, diff};
  return {-diff, 0.0};
}

inline std::optional<double> debt_margin(std::optional<double> admem, double green_limit,
                                         double red_limit) {
  if (!admem) return std::nullopt;
  if (green_limit == 0.0)
    throw Error(Errc::DegenerateGreenLimit, "green limit is zero, margin is undefined");
  return *admem / green_limit * (red_limit - green_limit);
}

inline std::optional<long long> red_percentage(std::optional<double> debt,
                                               std::optional<double> margin) {
  if (!debt) return std::nullopt;
  if (*debt == 0.0) return 0;
  if (!margin || *margin == 0.0)
    throw Error(Errc::ZeroMarginWithDebt, "positive debt with zero margin");
  return static_cast<long long>(std::trunc(100.0 * *debt / *margin));
}

namespace detail {
inline std::vector<LedgerRow> ledger_from_totals(
    const std::map<std::string, std::optional<double>>& ihdigdp,
    const std::map<std::string, std::optional<double>>& em, Year row_year, double green_limit,
    double red_limit) {
  double world_ihdigdp = 0.0;
  for (const auto& [code, v] : ihdigdp)
    if (v) world_ihdigdp += *v;
  if (world_ihdigdp <= 0.0)
    throw Error(Errc::DegenerateNormalization, "world IHDIGDP must be positive");

  std::vector<LedgerRow> rows;
  rows.reserve(ihdigdp.size());
  for (const auto& [code, v] : ihdigdp) {
    LedgerRow row;
    row.country = code;
    row.year = row_year;
    row.admem = admissible_emissions(v, world_ihdigdp, green_limit);
    auto it = em.find(code);
    auto [credit, debt] = credit_debt(it == em.end() ? std::nullopt : it->second, row.admem);
    row.credit = credit;
    row.debt = debt;
    row.margin = debt_margin(row.admem, green_limit, red_limit);
    row.red_pct = red_percentage(row.debt, row.margin);
    rows.push_back(std::move(row));
  }
  return rows;
}
}  // namespace detail

// One row per country observed in the year, ordered by country code.
// Countries without IHDIGDP get an all-missing row; their emissions still
// count toward world aggregates elsewhere.
inline std::vector<LedgerRow> annual_ledger(const CountryPanel& panel, Year year, double z,
                                            const GlobalScenarios& scenarios) {
  BalancingContext ctx = balancing_context(panel, year);
  std::map<std::string, std::optional<double>> ihdigdp, em;
  for (const auto& [code, id] : panel.countries) {
    const auto* obs = panel.find(code, year);
    if (!obs) continue;
    ihdigdp[code] = country_ihdigdp(panel, code, year, ctx, z);
    em[code] = obs->total_emissions();
  }
  return detail::ledger_from_totals(ihdigdp, em, year, scenarios.green.value_at(year),
                                    scenarios.red.value_at(year));
}

// Sums per-country activity and emissions plus the scenario limits over an
// inclusive year window, then applies the same share/credit/debt/margin
// pipeline to the cumulated quantities. A one-year window reproduces the
// annual ledger exactly.
inline std::vector<LedgerRow> cumulative_ledger(const CountryPanel& panel, Year from, Year to,
                                                double z, const GlobalScenarios& scenarios) {
  if (to < from)
    throw Error(Errc::InvalidParameter, "cumulative window is empty");
  std::map<std::string, std::optional<double>> cum_ihdigdp, cum_em;
  for (Year y = from; y <= to; ++y) {
    if (!panel.has_year(y)) continue;
    BalancingContext ctx = balancing_context(panel, y);
    for (const auto& [code, id] : panel.countries) {
      const auto* obs = panel.find(code, y);
      if (!obs) continue;
      if (auto v = country_ihdigdp(panel, code, y, ctx, z)) {
        auto& slot = cum_ihdigdp[code];
        slot = slot.value_or(0.0) + *v;
      } else {
        cum_ihdigdp.try_emplace(code, std::nullopt);
      }
      if (auto e = obs->total_emissions()) {
        auto& slot = cum_em[code];
        slot = slot.value_or(0.0) + *e;
      } else {
        cum_em.try_emplace(code, std::nullopt);
      }
    }
  }
  if (cum_ihdigdp.empty())
    throw Error(Errc::EmptyYear, "no observations inside the cumulative window");

  double cum_green = 0.0, cum_red = 0.0;
  for (Year y = from; y <= to; ++y) {
    cum_green += scenarios.green.value_at(y);
    cum_red += scenarios.red.value_at(y);
  }
  return detail::ledger_from_totals(cum_ihdigdp, cum_em, to, cum_green, cum_red);
}

}  // namespace carbonledger
