#include "edgelab/quadrature.hpp"

#include <numbers>

#include "edgelab/error.hpp"

namespace edgelab {

QuadratureRule gauss_legendre(int m, double lo, double hi) {
  if (m < 1) throw Error(ErrorKind::InvalidInput, "gauss_legendre: order must be positive");
  QuadratureRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  const double mid = 0.5 * (hi + lo);
  const double half = 0.5 * (hi - lo);
  const int n_half = (m + 1) / 2;
  for (int i = 0; i < n_half; ++i) {
    // Tricomi's initial guess, then Newton on the three-term recurrence.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // one more evaluation for the derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[m - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[m - 1 - i] = half * w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = mid;
  return rule;
}

QuadratureRule composite_gauss_legendre(int m, int panels, double lo, double hi) {
  if (panels < 1) throw Error(ErrorKind::InvalidInput, "composite_gauss_legendre: panels must be positive");
  QuadratureRule out;
  out.nodes.reserve(static_cast<std::size_t>(m) * panels);
  out.weights.reserve(static_cast<std::size_t>(m) * panels);
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    const double b = (p + 1 == panels) ? hi : a + h;
    const auto r = gauss_legendre(m, a, b);
    out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
    out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
  }
  return out;
}

namespace {

inline void two_sum(double a, double b, double& s, double& e) noexcept {
  s = a + b;
  const double z = s - a;
  e = (a - (s - z)) + (b - z);
}

}  // namespace

double dot2(const double* x, const double* y, std::size_t n) noexcept {
  double p = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = x[i] * y[i];
    const double r = std::fma(x[i], y[i], -h);
    double q = 0.0;
    two_sum(p, h, p, q);
    s += q + r;
  }
  return p + s;
}

double dot_compensated(const double* x, const double* y, std::size_t n) noexcept {
  CompensatedSum acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(x[i] * y[i]);
  return acc.value();
}

}  // namespace edgelab
