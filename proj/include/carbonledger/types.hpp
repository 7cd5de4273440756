#pragma once

#include <stdexcept>
#include <string>

namespace carbonledger {

using Year = int;

inline constexpr Year kMinYear = 1900;
inline constexpr Year kMaxYear = 2200;

inline bool year_in_range(Year y) { return y >= kMinYear && y <= kMaxYear; }

// A country is identified by its code; the display name is free-form and
// defaults to the code when the input carries no separate name.
struct CountryId {
  std::string code;
  std::string display_name;

  bool operator==(const CountryId&) const = default;
};

enum class Errc {
  MalformedHeader,
  MalformedRow,
  DuplicateObservation,
  NegativeQuantity,
  EmptyYear,
  DivisionByZeroGdp,
  DivisionByZeroPopulation,
  DivisionByZeroActivity,
  DegenerateNormalization,
  MissingBaseYear,
  MissingCurve,
  ScenarioInvariant,
  DegenerateGreenLimit,
  ZeroMarginWithDebt,
  UnknownCountry,
  InsufficientCredit,
  LandUseDebtOutstanding,
  MissingEndpoint,
  NegativeIntensity,
  InvalidParameter,
  FileNotFound,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::DuplicateObservation: return "DuplicateObservation";
    case Errc::NegativeQuantity: return "NegativeQuantity";
    case Errc::EmptyYear: return "EmptyYear";
    case Errc::DivisionByZeroGdp: return "DivisionByZeroGdp";
    case Errc::DivisionByZeroPopulation: return "DivisionByZeroPopulation";
    case Errc::DivisionByZeroActivity: return "DivisionByZeroActivity";
    case Errc::DegenerateNormalization: return "DegenerateNormalization";
    case Errc::MissingBaseYear: return "MissingBaseYear";
    case Errc::MissingCurve: return "MissingCurve";
    case Errc::ScenarioInvariant: return "ScenarioInvariant";
    case Errc::DegenerateGreenLimit: return "DegenerateGreenLimit";
    case Errc::ZeroMarginWithDebt: return "ZeroMarginWithDebt";
    case Errc::UnknownCountry: return "UnknownCountry";
    case Errc::InsufficientCredit: return "InsufficientCredit";
    case Errc::LandUseDebtOutstanding: return "LandUseDebtOutstanding";
    case Errc::MissingEndpoint: return "MissingEndpoint";
    case Errc::NegativeIntensity: return "NegativeIntensity";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::FileNotFound: return "FileNotFound";
  }
  return "Unknown";
}

// Input-validation failures exit with status 2; computation failures with 3.
inline bool is_validation_error(Errc c) {
  switch (c) {
    case Errc::MalformedHeader:
    case Errc::MalformedRow:
    case Errc::DuplicateObservation:
    case Errc::NegativeQuantity:
    case Errc::EmptyYear:
    case Errc::MissingBaseYear:
    case Errc::MissingCurve:
    case Errc::ScenarioInvariant:
    case Errc::UnknownCountry:
    case Errc::InsufficientCredit:
    case Errc::LandUseDebtOutstanding:
    case Errc::MissingEndpoint:
    case Errc::InvalidParameter:
    case Errc::FileNotFound:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, long row = -1, long index = -1)
      : std::runtime_error(message), code_(code), row_(row), index_(index) {}

  Errc code() const { return code_; }
  const char* name() const { return errc_name(code_); }
  long row() const { return row_; }      // 1-based input row, -1 when not applicable
  long index() const { return index_; }  // transfer index, -1 when not applicable

 private:
  Errc code_;
  long row_;
  long index_;
};

}  // namespace carbonledger
