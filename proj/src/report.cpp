#include "edgelab/report.hpp"

#include <cmath>
#include <limits>

#include "edgelab/error.hpp"

namespace edgelab {

namespace {

// JSON has no NaN/Inf; encode them as strings so round trips stay lossless.
nlohmann::json encode(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double decode(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::InvalidInput, "report: bad numeric string '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

std::string to_string(Relation r) {
  switch (r) {
    case Relation::LessEqual: return "<=";
    case Relation::Less: return "<";
    case Relation::GreaterEqual: return ">=";
    case Relation::Greater: return ">";
  }
  return "?";
}

Relation relation_from_string(const std::string& s) {
  if (s == "<=") return Relation::LessEqual;
  if (s == "<") return Relation::Less;
  if (s == ">=") return Relation::GreaterEqual;
  if (s == ">") return Relation::Greater;
  throw Error(ErrorKind::InvalidInput, "report: unknown relation '" + s + "'");
}

Criterion Criterion::make(std::string name, double value, Relation rel, double threshold) {
  Criterion c{std::move(name), value, threshold, rel, false};
  switch (rel) {
    case Relation::LessEqual: c.pass = value <= threshold; break;
    case Relation::Less: c.pass = value < threshold; break;
    case Relation::GreaterEqual: c.pass = value >= threshold; break;
    case Relation::Greater: c.pass = value > threshold; break;
  }
  return c;
}

bool ConvergenceReport::passed() const {
  for (const auto& c : criteria) {
    if (!c.pass) return false;
  }
  return true;
}

void ConvergenceReport::add_sample(int n, double error) {
  if (!n_values.empty() && n <= n_values.back()) {
    throw Error(ErrorKind::InvalidInput, "report: n values must be strictly increasing");
  }
  if (!(error >= 0.0)) throw Error(ErrorKind::InvalidInput, "report: errors must be nonnegative");
  n_values.push_back(n);
  errors.push_back(error);
}

void ConvergenceReport::fit_slope() { slope = loglog_slope(n_values, errors); }

double loglog_slope(const std::vector<int>& n, const std::vector<double>& errors) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < n.size() && i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || n[i] <= 0) continue;
    const double x = std::log(static_cast<double>(n[i]));
    const double y = std::log(errors[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  const double den = m * sxx - sx * sx;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / den;
}

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json j;
  j["diagnostic"] = r.diagnostic;
  j["n_values"] = r.n_values;
  nlohmann::json errs = nlohmann::json::array();
  for (double e : r.errors) errs.push_back(encode(e));
  j["errors"] = errs;
  j["slope"] = encode(r.slope);
  nlohmann::json crit = nlohmann::json::array();
  for (const auto& c : r.criteria) {
    crit.push_back({{"name", c.name},
                    {"value", encode(c.value)},
                    {"threshold", encode(c.threshold)},
                    {"relation", to_string(c.relation)},
                    {"pass", c.pass}});
  }
  j["criteria"] = crit;
  nlohmann::json met = nlohmann::json::object();
  for (const auto& [k, v] : r.metrics) met[k] = encode(v);
  j["metrics"] = met;
  j["pass"] = r.passed();
  return j;
}

ConvergenceReport report_from_json(const nlohmann::json& j) {
  ConvergenceReport r;
  r.diagnostic = j.at("diagnostic").get<std::string>();
  r.n_values = j.at("n_values").get<std::vector<int>>();
  for (const auto& e : j.at("errors")) r.errors.push_back(decode(e));
  r.slope = decode(j.at("slope"));
  for (const auto& c : j.at("criteria")) {
    Criterion cr;
    cr.name = c.at("name").get<std::string>();
    cr.value = decode(c.at("value"));
    cr.threshold = decode(c.at("threshold"));
    cr.relation = relation_from_string(c.at("relation").get<std::string>());
    cr.pass = c.at("pass").get<bool>();
    r.criteria.push_back(cr);
  }
  for (const auto& [k, v] : j.at("metrics").items()) r.metrics[k] = decode(v);
  return r;
}

}  // namespace edgelab
