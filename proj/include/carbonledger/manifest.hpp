#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>

#include "json.hpp"
#include "types.hpp"

namespace carbonledger {

// Run configuration as read from a manifest file. Every field is optional;
// the command line may override any of them and defaults fill the rest.
struct RunManifest {
  std::string base_dir;  // directory of the manifest, anchors relative paths

  std::optional<std::string> panel;
  std::optional<std::string> scenarios;
  std::optional<std::string> gwp;
  std::optional<std::string> transfers;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;  // csv | json
  std::optional<std::string> mode;    // ct | nc | both

  std::optional<double> z;
  std::optional<double> em_world_1990;
  std::optional<double> red_bct;
  std::optional<Year> snapshot_year;
  std::optional<Year> normalization_year;
  std::optional<Year> year;
  std::optional<std::pair<Year, Year>> window;

  std::optional<double> tax_drag;
  std::optional<double> tax_abatement;
  std::optional<double> tech_rate;
  std::optional<double> global_floor;
  std::optional<std::pair<Year, Year>> horizon;

  // Joins a manifest-relative path onto the manifest's directory.
  std::string resolve(const std::string& path) const {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (std::filesystem::path(base_dir) / p).string();
  }
};

namespace detail {
inline std::optional<std::pair<Year, Year>> year_pair(const nlohmann::json& j,
                                                      const std::string& key) {
  if (!j.contains(key)) return std::nullopt;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    throw Error(Errc::InvalidParameter, "manifest field '" + key + "' must be [from, to]");
  return std::make_pair(v[0].get<Year>(), v[1].get<Year>());
}

template <typename T>
inline std::optional<T> opt_field(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::InvalidParameter, "manifest field '" + key + "' has the wrong type");
  }
}
}  // namespace detail

inline RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(Errc::FileNotFound, "cannot open manifest '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidParameter, "manifest is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object())
    throw Error(Errc::InvalidParameter, "manifest must be a JSON object");

  RunManifest m;
  m.base_dir = std::filesystem::path(path).parent_path().string();
  m.panel = detail::opt_field<std::string>(j, "panel");
  m.scenarios = detail::opt_field<std::string>(j, "scenarios");
  m.gwp = detail::opt_field<std::string>(j, "gwp");
  m.transfers = detail::opt_field<std::string>(j, "transfers");
  m.out_dir = detail::opt_field<std::string>(j, "out");
  m.format = detail::opt_field<std::string>(j, "format");
  m.mode = detail::opt_field<std::string>(j, "mode");
  m.z = detail::opt_field<double>(j, "z");
  m.em_world_1990 = detail::opt_field<double>(j, "em_world_1990");
  m.red_bct = detail::opt_field<double>(j, "red_bct");
  m.snapshot_year = detail::opt_field<Year>(j, "snapshot_year");
  m.normalization_year = detail::opt_field<Year>(j, "normalization_year");
  m.year = detail::opt_field<Year>(j, "year");
  m.window = detail::year_pair(j, "window");

  if (j.contains("projection")) {
    const auto& p = j.at("projection");
    if (!p.is_object())
      throw Error(Errc::InvalidParameter, "manifest field 'projection' must be an object");
    m.tax_drag = detail::opt_field<double>(p, "tax_drag");
    m.tax_abatement = detail::opt_field<double>(p, "tax_abatement");
    m.tech_rate = detail::opt_field<double>(p, "tech_rate");
    m.global_floor = detail::opt_field<double>(p, "global_floor");
    m.horizon = detail::year_pair(p, "horizon");
  }
  return m;
}

}  // namespace carbonledger
