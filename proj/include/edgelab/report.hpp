#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace edgelab {

enum class Relation { LessEqual, Less, GreaterEqual, Greater };

std::string to_string(Relation r);
Relation relation_from_string(const std::string& s);

/// One pass/fail check: value (relation) threshold.
struct Criterion {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  Relation relation = Relation::LessEqual;
  bool pass = false;

  static Criterion make(std::string name, double value, Relation rel, double threshold);
};

/// Measured errors over a sweep of matrix sizes plus the derived criteria.
struct ConvergenceReport {
  std::string diagnostic;
  std::vector<int> n_values;
  std::vector<double> errors;
  double slope = 0.0;  // least-squares log-log slope of errors vs n (NaN if undefined)
  std::vector<Criterion> criteria;
  std::map<std::string, double> metrics;

  bool passed() const;
  /// Appends one (n, error) sample; n must exceed the previous one.
  void add_sample(int n, double error);
  /// Recomputes `slope` from the samples.
  void fit_slope();
};

/// Least-squares slope of log(error) against log(n); NaN with fewer than two
/// positive samples.
double loglog_slope(const std::vector<int>& n, const std::vector<double>& errors);

nlohmann::json to_json(const ConvergenceReport& report);
ConvergenceReport report_from_json(const nlohmann::json& j);

}  // namespace edgelab
