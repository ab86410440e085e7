#pragma once

#include <array>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace peelkit::verify {

/// One (ℓ, t) row. Continuum rows use ell = 0 and carry no KS.
struct SummaryRow {
  long ell = 0;
  double t = 0.0;
  double ks = NAN;
  double ks_lo = NAN;
  double ks_hi = NAN;
  std::array<double, 9> q{};
  std::size_t n = 0;
  double ess = NAN;
};

/// Rows of one compared functional; the primary observable is written to
/// <id>.csv and the others to <id>.<name>.csv.
struct Observable {
  std::string name;
  std::vector<SummaryRow> rows;
};

struct Gate {
  std::string name;
  double value = NAN;
  std::string relation;  // "<", "<=", ">=", "in"
  double threshold = NAN;
  double threshold_hi = NAN;  // upper end for "in"
  bool pass = false;
  bool advisory = false;  // reported but not part of the verdict
  std::string note;
};

struct ExperimentResult {
  std::string id;
  std::vector<Observable> observables;
  std::vector<Gate> gates;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  double wall_time = 0.0;

  bool pass() const;
  const Gate& gate(const std::string& name) const;
};

/// Header ell,t,ks,ks_ci_lo,ks_ci_hi,q01,...,q99,n,ess. Numbers use %.10g,
/// missing values are empty fields.
void write_summary_csv(const Observable& obs, std::ostream& out);

nlohmann::ordered_json verdict_json(const ExperimentResult& result);

/// Writes the CSV files and <id>.verdict.json into `dir`.
void write_result(const ExperimentResult& result, const std::string& dir);

Gate make_gate(const std::string& name, double value, const std::string& relation, double threshold,
               std::string note = {});
Gate make_range_gate(const std::string& name, double value, double lo, double hi, std::string note = {});

}  // namespace peelkit::verify
