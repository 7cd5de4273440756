#pragma once

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "panel.hpp"
#include "types.hpp"

namespace carbonledger {

// Year ceilings used to balance GDP and IHDIxCapita onto a common scale.
struct BalancingContext {
  Year year = 0;
  double gdp_ppp_max = 0.0;          // $B
  double ihdixcapita_max = 0.0;      // IHDI-points x persons
  double gdp_ppp_of_ihdi_max = 0.0;  // $B, GDP of the country attaining ihdixcapita_max
  std::string argmax_country;
};

struct ZNormalization {
  double z = 1.0;
  Year reference_year = 0;
};

struct IndicatorRow {
  std::optional<double> ghg_int;          // tCO2e/$K
  std::optional<double> ghg_pcapita;      // tCO2e/person
  std::optional<double> ihdixcapita;      // IHDI-points x persons
  std::optional<double> gdp_bal;          // $B
  std::optional<double> ihdixcapita_bal;  // $B
  std::optional<double> ihdigdp;          // $B
  std::optional<double> mghg_int;         // tCO2e/$K
};

struct IndicatorTable {
  Year year = 0;
  std::map<std::string, IndicatorRow> rows;
};

inline std::optional<double> ghg_intensity(std::optional<double> em,
                                           std::optional<double> gdp_ppp) {
  if (!em || !gdp_ppp) return std::nullopt;
  if (*gdp_ppp == 0.0) throw Error(Errc::DivisionByZeroGdp, "GDP (PPP) is zero");
  return *em / *gdp_ppp;  // MtCO2e/$B == tCO2e/$K
}

inline std::optional<double> ghg_per_capita(std::optional<double> em,
                                            std::optional<double> capita) {
  if (!em || !capita) return std::nullopt;
  if (*capita == 0.0) throw Error(Errc::DivisionByZeroPopulation, "population is zero");
  return *em * 1e6 / *capita;  // tonnes per person
}

inline std::optional<double> ihdi_x_capita(std::optional<double> ihdi,
                                           std::optional<double> capita_snapshot) {
  if (!ihdi || !capita_snapshot) return std::nullopt;
  return *ihdi * *capita_snapshot;
}

inline std::optional<double> country_ihdixcapita(const CountryPanel& panel,
                                                 const std::string& code, Year year) {
  const auto* obs = panel.find(code, year);
  if (!obs) return std::nullopt;
  return ihdi_x_capita(obs->ihdi, panel.snapshot_population(code));
}

// The ceilings are taken over countries with the relevant values present.
// The IHDIxCapita argmax is restricted to countries that also report GDP,
// since the argmax country anchors the GDP balancing ratio. Ties go to the
// lexicographically smallest country code and are logged.
inline BalancingContext balancing_context(const CountryPanel& panel, Year year) {
  BalancingContext ctx;
  ctx.year = year;
  bool any_gdp = false, any_both = false;
  for (const auto& [code, id] : panel.countries) {
    const auto* obs = panel.find(code, year);
    if (!obs) continue;
    if (obs->gdp_ppp) {
      any_gdp = true;
      if (*obs->gdp_ppp > ctx.gdp_ppp_max) ctx.gdp_ppp_max = *obs->gdp_ppp;
    }
    auto ix = ihdi_x_capita(obs->ihdi, panel.snapshot_population(code));
    if (!ix || !obs->gdp_ppp) continue;
    if (any_both && *ix == ctx.ihdixcapita_max)
      std::clog << "balancing_context: IHDIxCapita tie between " << ctx.argmax_country
                << " and " << code << " in " << year << ", keeping "
                << ctx.argmax_country << '\n';
    if (!any_both || *ix > ctx.ihdixcapita_max) {
      ctx.ihdixcapita_max = *ix;
      ctx.gdp_ppp_of_ihdi_max = *obs->gdp_ppp;
      ctx.argmax_country = code;
    }
    any_both = true;
  }
  if (!any_gdp || !any_both)
    throw Error(Errc::EmptyYear, "no country with GDP and IHDIxCapita in year " +
                                     std::to_string(year));
  if (ctx.gdp_ppp_max <= 0.0 || ctx.ihdixcapita_max <= 0.0 || ctx.gdp_ppp_of_ihdi_max <= 0.0)
    throw Error(Errc::DegenerateNormalization,
                "balancing ceilings must be positive in year " + std::to_string(year));
  return ctx;
}

inline std::optional<double> balanced_ihdixcapita(std::optional<double> ihdixcapita,
                                                  const BalancingContext& ctx) {
  if (!ihdixcapita) return std::nullopt;
  return ctx.gdp_ppp_max * *ihdixcapita / ctx.ihdixcapita_max;
}

inline std::optional<double> balanced_gdp(std::optional<double> gdp_ppp,
                                          const BalancingContext& ctx) {
  if (!gdp_ppp) return std::nullopt;
  return ctx.gdp_ppp_max * *gdp_ppp / ctx.gdp_ppp_of_ihdi_max;
}

inline std::optional<double> ihdigdp_value(std::optional<double> gdp_bal,
                                           std::optional<double> ihdixcapita_bal, double z) {
  if (!gdp_bal || !ihdixcapita_bal) return std::nullopt;
  return z * (*gdp_bal + *ihdixcapita_bal) / 2.0;
}

inline std::optional<double> country_ihdigdp(const CountryPanel& panel, const std::string& code,
                                             Year year, const BalancingContext& ctx, double z) {
  const auto* obs = panel.find(code, year);
  if (!obs) return std::nullopt;
  auto ix = ihdi_x_capita(obs->ihdi, panel.snapshot_population(code));
  return ihdigdp_value(balanced_gdp(obs->gdp_ppp, ctx), balanced_ihdixcapita(ix, ctx), z);
}

inline std::optional<double> mghg_intensity(std::optional<double> em,
                                            std::optional<double> ihdigdp) {
  if (!em || !ihdigdp) return std::nullopt;
  if (*ihdigdp == 0.0) throw Error(Errc::DivisionByZeroActivity, "IHDIGDP is zero");
  return *em / *ihdigdp;
}

// Solves for the scalar making world IHDIGDP match world GDP (PPP) in the
// panel's normalization year, over the countries that have both quantities.
inline ZNormalization fit_z(const CountryPanel& panel) {
  const Year ref = panel.normalization_year;
  BalancingContext ctx = balancing_context(panel, ref);
  double world_gdp = 0.0, unscaled = 0.0;
  for (const auto& [code, id] : panel.countries) {
    const auto* obs = panel.find(code, ref);
    if (!obs || !obs->gdp_ppp) continue;
    auto ix = ihdi_x_capita(obs->ihdi, panel.snapshot_population(code));
    auto mean = ihdigdp_value(balanced_gdp(obs->gdp_ppp, ctx), balanced_ihdixcapita(ix, ctx), 1.0);
    if (!mean) continue;
    world_gdp += *obs->gdp_ppp;
    unscaled += *mean;
  }
  if (unscaled == 0.0)
    throw Error(Errc::DegenerateNormalization,
                "unscaled world IHDIGDP is zero in year " + std::to_string(ref));
  return ZNormalization{world_gdp / unscaled, ref};
}

inline IndicatorTable indicator_table(const CountryPanel& panel, Year year, double z) {
  BalancingContext ctx = balancing_context(panel, year);
  IndicatorTable table;
  table.year = year;
  for (const auto& [code, id] : panel.countries) {
    const auto* obs = panel.find(code, year);
    if (!obs) continue;
    IndicatorRow row;
    auto em = obs->total_emissions();
    row.ghg_int = ghg_intensity(em, obs->gdp_ppp);
    row.ghg_pcapita = ghg_per_capita(em, obs->population);
    row.ihdixcapita = ihdi_x_capita(obs->ihdi, panel.snapshot_population(code));
    row.gdp_bal = balanced_gdp(obs->gdp_ppp, ctx);
    row.ihdixcapita_bal = balanced_ihdixcapita(row.ihdixcapita, ctx);
    row.ihdigdp = ihdigdp_value(row.gdp_bal, row.ihdixcapita_bal, z);
    row.mghg_int = mghg_intensity(em, row.ihdigdp);
    table.rows.emplace(code, row);
  }
  return table;
}

}  // namespace carbonledger
