// carbon-ledger: country-level greenhouse gas accounting from panel data.
//
// Subcommands compute per-country activity and intensity indicators, the
// annual and cumulative emission ledgers against global limit curves, border
// tax schedules, emission-trading clearing, and ten-year projections.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "carbonledger/csv.hpp"
#include "carbonledger/indicators.hpp"
#include "carbonledger/ledger.hpp"
#include "carbonledger/manifest.hpp"
#include "carbonledger/panel.hpp"
#include "carbonledger/policy.hpp"
#include "carbonledger/projection.hpp"
#include "carbonledger/scenario.hpp"
#include "carbonledger/types.hpp"

namespace cl = carbonledger;
using nlohmann::ordered_json;

namespace {

struct Options {
  std::string panel_path;
  std::string scenarios_path;
  std::string gwp_path;
  std::string transfers_path;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string mode = "both";

  double z = std::numeric_limits<double>::quiet_NaN();
  double em_world_1990 = std::numeric_limits<double>::quiet_NaN();
  double red_bct = 100.0;
  cl::Year snapshot_year = 1990;
  cl::Year norm_year = 1990;
  cl::Year year = 2009;
  cl::Year window_from = 1990;
  cl::Year window_to = 2009;

  cl::ProjectionConfig proj;
  bool horizon_set = false;

  bool paper_rounding = false;
  bool with_timestamp = true;

  std::string importer;
  std::string exporter;
};

// A table cell is a JSON scalar: number, string, or null for a missing value.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<ordered_json>> rows;
};

std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

std::string sig4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string render_number(double v, const Options& opts) {
  if (opts.paper_rounding) return sig4(v);
  return cl::csv::format_number(v);
}

std::string render_csv(const Table& t, const Options& opts) {
  std::string out;
  if (opts.with_timestamp) out += "# generated " + iso_timestamp() + "\n";
  for (size_t i = 0; i < t.header.size(); ++i)
    out += cl::csv::escape(t.header[i]) + (i + 1 < t.header.size() ? "," : "\n");
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      const auto& cell = row[i];
      if (cell.is_null()) {
        // empty field
      } else if (cell.is_string()) {
        out += cl::csv::escape(cell.get<std::string>());
      } else if (cell.is_number_integer()) {
        out += std::to_string(cell.get<long long>());
      } else {
        out += render_number(cell.get<double>(), opts);
      }
      out += (i + 1 < row.size() ? "," : "\n");
    }
  }
  return out;
}

std::string render_json(const Table& t, const Options& opts) {
  ordered_json doc;
  if (opts.with_timestamp) doc["generated"] = iso_timestamp();
  doc["rows"] = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json obj;
    for (size_t i = 0; i < row.size() && i < t.header.size(); ++i) {
      const auto& cell = row[i];
      if (!cell.is_null() && cell.is_number_float() && opts.paper_rounding)
        obj[t.header[i]] = std::strtod(sig4(cell.get<double>()).c_str(), nullptr);
      else
        obj[t.header[i]] = cell;
    }
    doc["rows"].push_back(std::move(obj));
  }
  return doc.dump(2) + "\n";
}

void write_table(const Table& t, const std::string& stem, const Options& opts) {
  std::filesystem::path dir(opts.out_dir.empty() ? "." : opts.out_dir);
  std::filesystem::create_directories(dir);
  auto path = dir / (stem + (opts.format == "json" ? ".json" : ".csv"));
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw cl::Error(cl::Errc::FileNotFound, "cannot write '" + path.string() + "'");
  out << (opts.format == "json" ? render_json(t, opts) : render_csv(t, opts));
  std::cout << "wrote: " << path.string() << '\n';
}

ordered_json cell(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

ordered_json cell_int(const std::optional<long long>& v) {
  if (!v) return nullptr;
  return *v;
}

std::ifstream open_input(const std::string& path, const char* what) {
  if (path.empty())
    throw cl::Error(cl::Errc::InvalidParameter,
                    std::string(what) + " input required (flag or manifest)");
  std::ifstream in(path);
  if (!in)
    throw cl::Error(cl::Errc::FileNotFound,
                    std::string("cannot open ") + what + " '" + path + "'");
  return in;
}

cl::CountryPanel load_panel_input(const Options& opts) {
  cl::GwpTable gwp;
  bool have_gwp = false;
  if (!opts.gwp_path.empty()) {
    auto in = open_input(opts.gwp_path, "gwp");
    gwp = cl::load_gwp(in);
    have_gwp = true;
  }
  auto in = open_input(opts.panel_path, "panel");
  return cl::load_panel(in, have_gwp ? &gwp : nullptr, opts.snapshot_year,
                        opts.norm_year);
}

cl::GlobalScenarios load_scenarios_input(const Options& opts) {
  auto in = open_input(opts.scenarios_path, "scenarios");
  auto curves = cl::load_scenarios(in);
  double base = opts.em_world_1990;
  if (std::isnan(base)) {
    auto it = curves.find("GB1");
    if (it == curves.end())
      throw cl::Error(cl::Errc::InvalidParameter,
                      "em_world_1990 required to build limit curves");
    base = it->second.value_at(1990);
  }
  return cl::make_global_scenarios(curves, base);
}

double resolve_z(const Options& opts, const cl::CountryPanel& panel) {
  if (!std::isnan(opts.z)) return opts.z;
  return cl::fit_z(panel).z;
}

int run_indicators(const Options& opts) {
  auto panel = load_panel_input(opts);
  double z = resolve_z(opts, panel);
  auto table = cl::indicator_table(panel, opts.year, z);

  Table combined;
  combined.header = {"country",        "year",    "ghg_int",
                     "ghg_pcapita",    "ihdixcapita_e6", "gdp_bal",
                     "ihdixcapita_bal", "ihdigdp", "mghg_int"};
  Table intensity{{"country", "year", "ghg_int", "ghg_pcapita"}, {}};
  Table activity{{"country", "year", "ihdixcapita_e6", "gdp_bal",
                  "ihdixcapita_bal", "ihdigdp"},
                 {}};
  Table modified{{"country", "year", "mghg_int"}, {}};

  for (const auto& [code, row] : table.rows) {
    std::optional<double> ix_e6;
    if (row.ihdixcapita) ix_e6 = *row.ihdixcapita / 1.0e6;
    combined.rows.push_back({code, table.year, cell(row.ghg_int),
                             cell(row.ghg_pcapita), cell(ix_e6),
                             cell(row.gdp_bal), cell(row.ihdixcapita_bal),
                             cell(row.ihdigdp), cell(row.mghg_int)});
    intensity.rows.push_back(
        {code, table.year, cell(row.ghg_int), cell(row.ghg_pcapita)});
    activity.rows.push_back({code, table.year, cell(ix_e6), cell(row.gdp_bal),
                             cell(row.ihdixcapita_bal), cell(row.ihdigdp)});
    modified.rows.push_back({code, table.year, cell(row.mghg_int)});
  }
  auto y = std::to_string(opts.year);
  write_table(combined, "indicators_" + y, opts);
  write_table(intensity, "intensity_" + y, opts);
  write_table(activity, "activity_" + y, opts);
  write_table(modified, "modified_intensity_" + y, opts);
  return 0;
}

Table ledger_table(const std::vector<cl::LedgerRow>& rows) {
  Table t;
  t.header = {"country", "year", "admem", "credit", "debt", "margin", "red_pct"};
  for (const auto& r : rows)
    t.rows.push_back({r.country, r.year, cell(r.admem), cell(r.credit),
                      cell(r.debt), cell(r.margin), cell_int(r.red_pct)});
  return t;
}

Table summary_table(const cl::WorldEtsSummary& ws) {
  Table t;
  t.header = {"metric", "value"};
  t.rows = {
      {"world_em", ws.world_em},
      {"green_limit", ws.green_limit},
      {"red_limit", ws.red_limit},
      {"total_allowed", ws.total_allowed},
      {"total_debt", ws.total_debt},
      {"total_credit", ws.total_credit},
      {"unrecoverable_debt", ws.unrecoverable_debt},
  };
  return t;
}

int run_ledger(const Options& opts) {
  auto panel = load_panel_input(opts);
  auto scen = load_scenarios_input(opts);
  double z = resolve_z(opts, panel);
  auto rows = cl::annual_ledger(panel, opts.year, z, scen);
  auto ws = cl::world_summary(panel, opts.year, rows, scen);
  auto y = std::to_string(opts.year);
  write_table(ledger_table(rows), "ledger_" + y, opts);
  write_table(summary_table(ws), "world_summary_" + y, opts);
  return 0;
}

int run_cumulative(const Options& opts) {
  auto panel = load_panel_input(opts);
  auto scen = load_scenarios_input(opts);
  double z = resolve_z(opts, panel);
  auto rows = cl::cumulative_ledger(panel, opts.window_from, opts.window_to, z, scen);
  Table t;
  t.header = {"country", "year",    "admem",       "credit",   "debt",
              "margin",  "red_pct", "window_from", "window_to"};
  for (const auto& r : rows)
    t.rows.push_back({r.country, r.year, cell(r.admem), cell(r.credit),
                      cell(r.debt), cell(r.margin), cell_int(r.red_pct),
                      opts.window_from, opts.window_to});
  write_table(t,
              "cumulative_" + std::to_string(opts.window_from) + "_" +
                  std::to_string(opts.window_to),
              opts);
  return 0;
}

int run_tax(const Options& opts) {
  auto panel = load_panel_input(opts);
  auto scen = load_scenarios_input(opts);
  double z = resolve_z(opts, panel);
  auto rows = cl::annual_ledger(panel, opts.year, z, scen);
  auto sched = cl::tax_schedule(rows, opts.red_bct);

  if (!opts.importer.empty() || !opts.exporter.empty()) {
    if (opts.importer.empty() || opts.exporter.empty())
      throw cl::Error(cl::Errc::InvalidParameter,
                      "pairwise tax needs both --importer and --exporter");
    double d = cl::differential_bct(sched, opts.importer, opts.exporter);
    if (opts.paper_rounding)
      std::cout << cl::format_one_decimal(d) << '\n';
    else
      std::cout << cl::csv::format_number(d) << '\n';
    return 0;
  }

  std::map<std::string, const cl::LedgerRow*> idx;
  for (const auto& r : rows) idx[r.country] = &r;
  Table t;
  t.header = {"country", "year", "red_pct", "bct"};
  for (const auto& [c, v] : sched.bct) {
    long long red = *idx.at(c)->red_pct;
    ordered_json bct_cell;
    if (opts.paper_rounding)
      bct_cell = cl::format_bct_display(red, opts.red_bct);
    else
      bct_cell = v;
    t.rows.push_back({c, sched.year, red, bct_cell});
  }
  write_table(t, "tax_" + std::to_string(opts.year), opts);
  return 0;
}

int run_ets_clear(const Options& opts) {
  auto panel = load_panel_input(opts);
  auto scen = load_scenarios_input(opts);
  double z = resolve_z(opts, panel);
  auto rows = cl::annual_ledger(panel, opts.year, z, scen);
  auto positions = cl::positions_from_ledger(rows, panel, opts.year);
  auto in = open_input(opts.transfers_path, "transfers");
  auto transfers = cl::load_transfers(in);
  auto cleared = cl::ets_clear(positions, transfers);
  auto updated = cl::recompute_red(rows, cleared);

  Table p;
  p.header = {"country", "credit", "debt", "landuse_debt", "cleared"};
  for (const auto& [c, pos] : cleared)
    p.rows.push_back({c, pos.credit, pos.debt, pos.landuse_debt, pos.cleared});
  auto y = std::to_string(opts.year);
  write_table(p, "positions_" + y, opts);
  write_table(ledger_table(updated), "ledger_cleared_" + y, opts);
  return 0;
}

int run_simulate(const Options& opts) {
  auto panel = load_panel_input(opts);
  auto scen = load_scenarios_input(opts);
  double z = resolve_z(opts, panel);

  cl::ProjectionConfig cfg = opts.proj;
  cfg.red_bct = opts.red_bct;
  if (!opts.horizon_set) {
    cfg.horizon_start = opts.year + 1;
    cfg.horizon_end = opts.year + 11;
  }
  cfg.validate();

  auto growth = cl::growth_profiles(panel, opts.year - 9, opts.year, z,
                                    cfg.global_floor);
  auto init = cl::initial_state(panel, opts.year, z, scen, opts.red_bct);

  std::vector<cl::Mode> modes;
  if (opts.mode == "ct")
    modes = {cl::Mode::CT};
  else if (opts.mode == "nc")
    modes = {cl::Mode::NC};
  else if (opts.mode == "both")
    modes = {cl::Mode::CT, cl::Mode::NC};
  else
    throw cl::Error(cl::Errc::InvalidParameter,
                    "mode must be ct, nc, or both, got '" + opts.mode + "'");

  Table plot;
  plot.header = {"mode", "year", "world_em"};
  for (auto mode : modes) {
    auto traj = cl::run_projection(init, mode, growth, scen, cfg);
    Table t;
    t.header = {"mode", "year",    "country", "ihdigdp",
                "mghg_int", "em", "red_pct", "bct"};
    const std::string mname = cl::mode_name(mode);
    for (const auto& st : traj) {
      for (const auto& [c, cs] : st.countries) {
        ordered_json bct_cell;
        if (opts.paper_rounding)
          bct_cell = cl::format_one_decimal(cs.bct);
        else
          bct_cell = cs.bct;
        t.rows.push_back(
            {mname, st.year, c, cs.ihdigdp, cs.mghg, cs.em, cs.red, bct_cell});
      }
      std::optional<double> world_mghg;
      if (st.world_ihdigdp > 0.0) world_mghg = st.world_em / st.world_ihdigdp;
      t.rows.push_back({mname, st.year, "WORLD", st.world_ihdigdp,
                        cell(world_mghg), st.world_em, nullptr, nullptr});
      plot.rows.push_back({mname, st.year, st.world_em});
    }
    write_table(t, "trajectory_" + mname, opts);
  }
  write_table(plot, "plot_world_em", opts);
  return 0;
}

void apply_manifest(Options& opts, const cl::RunManifest& m) {
  if (m.panel) opts.panel_path = m.resolve(*m.panel);
  if (m.scenarios) opts.scenarios_path = m.resolve(*m.scenarios);
  if (m.gwp) opts.gwp_path = m.resolve(*m.gwp);
  if (m.transfers) opts.transfers_path = m.resolve(*m.transfers);
  if (m.out_dir) opts.out_dir = *m.out_dir;
  if (m.format) opts.format = *m.format;
  if (m.mode) opts.mode = *m.mode;
  if (m.z) opts.z = *m.z;
  if (m.em_world_1990) opts.em_world_1990 = *m.em_world_1990;
  if (m.red_bct) opts.red_bct = *m.red_bct;
  if (m.snapshot_year) opts.snapshot_year = *m.snapshot_year;
  if (m.normalization_year) opts.norm_year = *m.normalization_year;
  if (m.year) opts.year = *m.year;
  if (m.window) {
    opts.window_from = m.window->first;
    opts.window_to = m.window->second;
  }
  if (m.tax_drag) opts.proj.tax_drag = *m.tax_drag;
  if (m.tax_abatement) opts.proj.tax_abatement = *m.tax_abatement;
  if (m.tech_rate) opts.proj.tech_rate = *m.tech_rate;
  if (m.global_floor) opts.proj.global_floor = *m.global_floor;
  if (m.horizon) {
    opts.proj.horizon_start = m.horizon->first;
    opts.proj.horizon_end = m.horizon->second;
    opts.horizon_set = true;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carbon-ledger: greenhouse gas accounting and projections"};
  app.require_subcommand(1);

  std::string manifest_path;
  std::string panel_flag, scenarios_flag, gwp_flag, transfers_flag;
  std::string out_flag, format_flag, mode_flag;
  std::string importer_flag, exporter_flag;
  double red_bct_flag = 0.0, tax_drag_flag = 0.0, tax_abatement_flag = 0.0;
  double tech_rate_flag = 0.0, floor_flag = 0.0;
  cl::Year year_flag = 0, snapshot_flag = 0, norm_flag = 0;
  std::vector<cl::Year> window_flag;

  app.add_option("--manifest", manifest_path, "run manifest (JSON)");
  auto* o_panel = app.add_option("--panel", panel_flag, "panel CSV");
  auto* o_scen = app.add_option("--scenarios", scenarios_flag, "scenario CSV");
  auto* o_gwp = app.add_option("--gwp", gwp_flag, "warming-potential CSV");
  auto* o_trans = app.add_option("--transfers", transfers_flag, "transfer CSV");
  auto* o_year = app.add_option("--year", year_flag, "accounting year");
  auto* o_window =
      app.add_option("--window", window_flag, "cumulative window: FROM TO")
          ->expected(2);
  auto* o_mode = app.add_option("--mode", mode_flag, "projection mode: ct|nc|both");
  auto* o_out = app.add_option("--out", out_flag, "output directory");
  auto* o_format = app.add_option("--format", format_flag, "output format: csv|json")
                       ->check(CLI::IsMember({"csv", "json"}));
  auto* o_paper = app.add_flag("--paper-rounding", "4 significant digits, "
                               "one-decimal tax rates");
  auto* o_nots = app.add_flag("--no-timestamp", "omit the generated line");
  auto* o_snap = app.add_option("--snapshot-year", snapshot_flag,
                                "population snapshot year");
  auto* o_norm = app.add_option("--norm-year", norm_flag, "normalization year");
  auto* o_redbct = app.add_option("--red-bct", red_bct_flag,
                                  "red percent per tax point");
  auto* o_drag = app.add_option("--tax-drag", tax_drag_flag,
                                "growth drag per tax point");
  auto* o_abat = app.add_option("--tax-abatement", tax_abatement_flag,
                                "intensity cut per tax point");
  auto* o_tech = app.add_option("--tech-rate", tech_rate_flag,
                                "autonomous intensity decline");
  auto* o_floor = app.add_option("--floor", floor_flag, "global growth floor");
  auto* o_imp = app.add_option("--importer", importer_flag, "importing country");
  auto* o_exp = app.add_option("--exporter", exporter_flag, "exporting country");

  auto* c_ind = app.add_subcommand("indicators", "per-country indicator tables");
  auto* c_led = app.add_subcommand("ledger", "annual emission ledger");
  auto* c_tax = app.add_subcommand("tax", "border tax schedule or pairwise rate");
  auto* c_ets = app.add_subcommand("ets-clear", "apply emission trading transfers");
  auto* c_sim = app.add_subcommand("simulate", "ten-year projection");
  auto* c_cum = app.add_subcommand("cumulative", "windowed cumulative ledger");
  for (auto* sub : {c_ind, c_led, c_tax, c_ets, c_sim, c_cum}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Options opts;
    if (const char* env_out = std::getenv("CARBON_LEDGER_OUT"))
      if (*env_out) opts.out_dir = env_out;
    if (!manifest_path.empty()) apply_manifest(opts, cl::load_manifest(manifest_path));

    if (o_panel->count()) opts.panel_path = panel_flag;
    if (o_scen->count()) opts.scenarios_path = scenarios_flag;
    if (o_gwp->count()) opts.gwp_path = gwp_flag;
    if (o_trans->count()) opts.transfers_path = transfers_flag;
    if (o_year->count()) opts.year = year_flag;
    if (o_window->count()) {
      opts.window_from = window_flag[0];
      opts.window_to = window_flag[1];
    }
    if (o_mode->count()) opts.mode = mode_flag;
    if (o_out->count()) opts.out_dir = out_flag;
    if (o_format->count()) opts.format = format_flag;
    if (o_paper->count()) opts.paper_rounding = true;
    if (o_nots->count()) opts.with_timestamp = false;
    if (o_snap->count()) opts.snapshot_year = snapshot_flag;
    if (o_norm->count()) opts.norm_year = norm_flag;
    if (o_redbct->count()) opts.red_bct = red_bct_flag;
    if (o_drag->count()) opts.proj.tax_drag = tax_drag_flag;
    if (o_abat->count()) opts.proj.tax_abatement = tax_abatement_flag;
    if (o_tech->count()) opts.proj.tech_rate = tech_rate_flag;
    if (o_floor->count()) opts.proj.global_floor = floor_flag;
    if (o_imp->count()) opts.importer = importer_flag;
    if (o_exp->count()) opts.exporter = exporter_flag;

    if (c_ind->parsed()) return run_indicators(opts);
    if (c_led->parsed()) return run_ledger(opts);
    if (c_tax->parsed()) return run_tax(opts);
    if (c_ets->parsed()) return run_ets_clear(opts);
    if (c_sim->parsed()) return run_simulate(opts);
    if (c_cum->parsed()) return run_cumulative(opts);
    return 2;
  } catch (const cl::Error& e) {
    ordered_json j;
    j["error"] = e.name();
    j["message"] = e.what();
    if (e.row() >= 0) j["row"] = e.row();
    if (e.index() >= 0) j["index"] = e.index();
    std::cerr << j.dump() << '\n';
    return cl::is_validation_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    ordered_json j;
    j["error"] = "Internal";
    j["message"] = e.what();
    std::cerr << j.dump() << '\n';
    return 3;
  }
}
