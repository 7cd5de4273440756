#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "indicators.hpp"
#include "ledger.hpp"
#include "panel.hpp"
#include "policy.hpp"
#include "scenario.hpp"
#include "types.hpp"

namespace carbonledger {

enum class Mode { CT, NC };  // carbon-tax feedback vs no-change baseline

inline const char* mode_name(Mode m) { return m == Mode::CT ? "CT" : "NC"; }

struct GrowthProfile {
  double raw_rate = 0.0;        // compound annual growth between the endpoints
  double effective_rate = 0.0;  // max(raw_rate, global floor)
};

inline GrowthProfile estimate_growth(std::optional<double> start_value,
                                     std::optional<double> end_value, int span_years,
                                     double global_floor) {
  if (span_years <= 0)
    throw Error(Errc::InvalidParameter, "growth span must cover at least one year");
  if (!start_value || !end_value || *start_value <= 0.0 || *end_value <= 0.0)
    throw Error(Errc::MissingEndpoint, "growth estimation needs positive endpoint values");
  GrowthProfile p;
  p.raw_rate = std::pow(*end_value / *start_value, 1.0 / span_years) - 1.0;
  p.effective_rate = std::max(p.raw_rate, global_floor);
  return p;
}

// Per-country compound growth of activity between two panel years.
inline std::map<std::string, GrowthProfile> growth_profiles(const CountryPanel& panel,
                                                            Year start_year, Year end_year,
                                                            double z, double global_floor) {
  if (end_year <= start_year)
    throw Error(Errc::InvalidParameter, "growth window must be increasing");
  BalancingContext ctx_start = balancing_context(panel, start_year);
  BalancingContext ctx_end = balancing_context(panel, end_year);
  std::map<std::string, GrowthProfile> profiles;
  for (const auto& [code, id] : panel.countries) {
    auto end_v = country_ihdigdp(panel, code, end_year, ctx_end, z);
    if (!end_v) continue;  // not covered at the end year, nothing to project
    auto start_v = country_ihdigdp(panel, code, start_year, ctx_start, z);
    if (!start_v || *start_v <= 0.0)
      throw Error(Errc::MissingEndpoint,
                  "no activity for '" + code + "' in " + std::to_string(start_year));
    profiles[code] = estimate_growth(start_v, end_v, end_year - start_year, global_floor);
  }
  return profiles;
}

struct ProjectionConfig {
  double tax_drag = 0.005;       // activity loss per BCT point
  double tax_abatement = 0.005;  // intensity reduction per BCT point
  double tech_rate = 0.011;      // autonomous annual intensity decline
  double red_bct = 100.0;
  double global_floor = 0.0167;  // minimum effective growth rate
  Year horizon_start = 2010;
  Year horizon_end = 2020;  // horizon_end < horizon_start means an empty horizon

  void validate() const {
    auto rate_ok = [](double r) { return r >= 0.0 && r < 1.0; };
    if (!rate_ok(tax_drag) || !rate_ok(tax_abatement) || !rate_ok(tech_rate))
      throw Error(Errc::InvalidParameter, "rates must lie in [0, 1)");
    if (red_bct <= 0.0)
      throw Error(Errc::InvalidParameter, "red_bct divisor must be positive");
    if (!year_in_range(horizon_start) || (horizon_end >= horizon_start && !year_in_range(horizon_end)))
      throw Error(Errc::InvalidParameter, "horizon years must lie in [1900, 2200]");
  }
};

struct CountryState {
  double ihdigdp = 0.0;  // $B
  double mghg = 0.0;     // tCO2e/$K
  double em = 0.0;       // MtCO2e, always ihdigdp * mghg
  long long red = 0;
  double bct = 0.0;  // percent, integer RED / red_bct, fed back un-displayed
};

struct ProjectionState {
  Year year = 0;
  std::map<std::string, CountryState> countries;
  double world_ihdigdp = 0.0;
  double world_em = 0.0;
};

// Seeds the projection with every country whose activity is known in the
// base year. Countries without emissions data carry zero intensity and so
// contribute activity, an admissible share, but no emissions.
inline ProjectionState initial_state(const CountryPanel& panel, Year year, double z,
                                     const GlobalScenarios& scenarios, double red_bct) {
  std::vector<LedgerRow> rows = annual_ledger(panel, year, z, scenarios);
  BalancingContext ctx = balancing_context(panel, year);
  ProjectionState st;
  st.year = year;
  for (const auto& row : rows) {
    auto activity = country_ihdigdp(panel, row.country, year, ctx, z);
    if (!activity) continue;
    CountryState cs;
    cs.ihdigdp = *activity;
    const auto* obs = panel.find(row.country, year);
    auto em = obs ? obs->total_emissions() : std::nullopt;
    cs.em = em.value_or(0.0);
    cs.mghg = (em && cs.ihdigdp > 0.0) ? *em / cs.ihdigdp : 0.0;
    cs.red = row.red_pct.value_or(0);
    cs.bct = bct_rate(cs.red, red_bct);
    st.world_ihdigdp += cs.ihdigdp;
    st.world_em += cs.em;
    st.countries.emplace(row.country, cs);
  }
  if (st.countries.empty())
    throw Error(Errc::EmptyYear, "no projectable countries in year " + std::to_string(year));
  return st;
}

// Advances one year. Activity compounds at the effective growth rate and,
// under CT, is dragged by the previous year's tax; intensity declines by the
// technology rate and, under CT, by tax-driven abatement. New RED and BCT
// come from re-deriving admissible shares against the scenario limits.
inline ProjectionState step_projection(const ProjectionState& prev, Mode mode,
                                       const std::map<std::string, GrowthProfile>& growth,
                                       const GlobalScenarios& scenarios,
                                       const ProjectionConfig& cfg) {
  ProjectionState next;
  next.year = prev.year + 1;
  for (const auto& [code, cs] : prev.countries) {
    auto it = growth.find(code);
    if (it == growth.end())
      throw Error(Errc::MissingEndpoint, "no growth profile for '" + code + "'");
    const double bct_prev = mode == Mode::CT ? cs.bct : 0.0;
    const double activity_factor = (1.0 + it->second.effective_rate) *
                                   (1.0 - cfg.tax_drag * bct_prev);
    const double intensity_factor = 1.0 - cfg.tax_abatement * bct_prev - cfg.tech_rate;
    if (activity_factor < 0.0 || intensity_factor < 0.0)
      throw Error(Errc::NegativeIntensity,
                  "update factor for '" + code + "' fell below zero in year " +
                      std::to_string(next.year));
    CountryState ns;
    ns.ihdigdp = cs.ihdigdp * activity_factor;
    ns.mghg = cs.mghg * intensity_factor;
    ns.em = ns.ihdigdp * ns.mghg;
    next.world_ihdigdp += ns.ihdigdp;
    next.world_em += ns.em;
    next.countries.emplace(code, ns);
  }

  const double green = scenarios.green.value_at(next.year);
  const double red_limit = scenarios.red.value_at(next.year);
  for (auto& [code, ns] : next.countries) {
    auto admem = admissible_emissions(ns.ihdigdp, next.world_ihdigdp, green);
    auto [credit, debt] = credit_debt(ns.em, admem);
    auto margin = debt_margin(admem, green, red_limit);
    ns.red = red_percentage(debt, margin).value_or(0);
    ns.bct = bct_rate(ns.red, cfg.red_bct);
  }
  return next;
}

// Trajectory: the base-year state followed by one state per horizon year.
// An empty horizon yields just the initial state.
inline std::vector<ProjectionState> run_projection(const ProjectionState& initial, Mode mode,
                                                   const std::map<std::string, GrowthProfile>& growth,
                                                   const GlobalScenarios& scenarios,
                                                   const ProjectionConfig& cfg) {
  cfg.validate();
  std::vector<ProjectionState> states{initial};
  if (cfg.horizon_end < cfg.horizon_start) return states;
  if (cfg.horizon_start != initial.year + 1)
    throw Error(Errc::InvalidParameter, "horizon must start the year after the base state");
  for (Year y = cfg.horizon_start; y <= cfg.horizon_end; ++y)
    states.push_back(step_projection(states.back(), mode, growth, scenarios, cfg));
  return states;
}

}  // namespace carbonledger
