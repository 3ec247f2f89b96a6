#include "edgelab/potential.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "edgelab/error.hpp"

namespace edgelab {

namespace {

void validate(const std::vector<double>& c) {
  if (c.size() < 3) {
    throw Error(ErrorKind::InvalidInput, "potential: degree must be at least 2");
  }
  for (double x : c) {
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::InvalidInput, "potential: all coefficients must be finite");
    }
  }
  if ((c.size() - 1) % 2 != 0) {
    throw Error(ErrorKind::InvalidInput,
                "potential: odd degree " + std::to_string(c.size() - 1) +
                    " (degree must be even for confinement)");
  }
  if (!(c.back() > 0.0)) {
    throw Error(ErrorKind::InvalidInput,
                "potential: non-positive leading coefficient (must be > 0 for confinement)");
  }
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

Potential::Potential(std::vector<double> coeffs, double shift)
    : coeffs_(std::move(coeffs)), shift_(shift) {
  validate(coeffs_);
  if (!std::isfinite(shift_)) {
    throw Error(ErrorKind::InvalidInput, "potential: shift must be finite");
  }
}

bool Potential::is_even() const noexcept {
  for (std::size_t k = 1; k < coeffs_.size(); k += 2) {
    if (coeffs_[k] != 0.0) return false;
  }
  return true;
}

std::complex<double> Potential::evaluate(std::complex<double> z, int order) const {
  if (order == 0) {
    std::complex<double> acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }
  if (order == 1) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = coeffs_.size() - 1; k >= 1; --k) {
      acc = acc * z + static_cast<double>(k) * coeffs_[k];
    }
    return acc;
  }
  throw Error(ErrorKind::InvalidInput, "potential: evaluation order must be 0 or 1");
}

double Potential::value(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Potential::derivative(double x) const {
  double acc = 0.0;
  for (std::size_t k = coeffs_.size() - 1; k >= 1; --k) {
    acc = acc * x + static_cast<double>(k) * coeffs_[k];
  }
  return acc;
}

double Potential::second_derivative(double x) const {
  double acc = 0.0;
  for (std::size_t k = coeffs_.size() - 1; k >= 2; --k) {
    acc = acc * x + static_cast<double>(k * (k - 1)) * coeffs_[k];
  }
  return acc;
}

std::complex<double> Potential::divided_difference(std::complex<double> z, double lambda) const {
  // h_m = (z^m - λ^m)/(z - λ) obeys h_{m+1} = z h_m + λ^m, h_1 = 1.
  const auto v = derivative_coefficients();
  std::complex<double> h = 1.0;
  double lam_pow = lambda;  // λ^m for the current m
  std::complex<double> acc = 0.0;
  for (std::size_t m = 1; m < v.size(); ++m) {
    acc += v[m] * h;
    h = z * h + lam_pow;
    lam_pow *= lambda;
  }
  return acc;
}

std::vector<double> Potential::derivative_coefficients() const {
  std::vector<double> v(coeffs_.size() - 1);
  for (std::size_t m = 0; m < v.size(); ++m) v[m] = static_cast<double>(m + 1) * coeffs_[m + 1];
  return v;
}

Potential Potential::centered(double delta) const {
  // Taylor shift: coefficients of V(λ + delta) via repeated synthetic division.
  std::vector<double> c = coeffs_;
  const std::size_t d = c.size() - 1;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = d - 1; k + 1 > i; --k) {
      c[k] += delta * c[k + 1];
      if (k == 0) break;
    }
  }
  return Potential(std::move(c), shift_ + delta);
}

Potential Potential::scaled(double factor) const {
  std::vector<double> c = coeffs_;
  for (double& x : c) x *= factor;
  return Potential(std::move(c), shift_);
}

std::pair<double, double> Potential::minimum() const {
  // Critical points are roots of V'; bracket them on a grid bounded by the
  // Cauchy root bound and polish by bisection.
  const auto v = derivative_coefficients();
  double bound = 0.0;
  for (std::size_t m = 0; m + 1 < v.size(); ++m) bound = std::max(bound, std::abs(v[m] / v.back()));
  bound += 1.0;
  const int samples = 4000;
  double best_x = 0.0;
  double best_v = value(0.0);
  auto consider = [&](double x) {
    const double val = value(x);
    if (val < best_v) {
      best_v = val;
      best_x = x;
    }
  };
  double prev_x = -bound;
  double prev_d = derivative(prev_x);
  for (int i = 1; i <= samples; ++i) {
    const double x = -bound + 2.0 * bound * i / samples;
    const double dv = derivative(x);
    if (dv == 0.0) consider(x);
    if ((prev_d < 0.0 && dv > 0.0)) {
      double lo = prev_x, hi = x;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (derivative(mid) < 0.0 ? lo : hi) = mid;
      }
      consider(0.5 * (lo + hi));
    }
    prev_x = x;
    prev_d = dv;
  }
  return {best_x, best_v};
}

std::string Potential::to_spec() const {
  std::ostringstream os;
  os << "poly:";
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (k) os << ',';
    os << format_double(coeffs_[k]);
  }
  return os.str();
}

Potential parse_potential(std::string_view spec) {
  constexpr std::string_view prefix = "poly:";
  if (spec.substr(0, prefix.size()) != prefix) {
    throw Error(ErrorKind::InvalidInput, "potential: malformed text, expected prefix 'poly:'");
  }
  std::string_view rest = spec.substr(prefix.size());
  if (rest.empty()) throw Error(ErrorKind::InvalidInput, "potential: malformed text, no coefficients");
  std::vector<double> coeffs;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = rest.find(',', pos);
    const std::string_view tok = rest.substr(pos, comma == std::string_view::npos ? rest.npos : comma - pos);
    double x = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw Error(ErrorKind::InvalidInput,
                  "potential: malformed text, bad decimal literal '" + std::string(tok) + "'");
    }
    coeffs.push_back(x);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return Potential(std::move(coeffs));
}

}  // namespace edgelab
