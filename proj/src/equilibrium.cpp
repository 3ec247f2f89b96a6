#include "edgelab/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "edgelab/error.hpp"
#include "edgelab/quadrature.hpp"

namespace edgelab {

namespace {

constexpr double kPi = std::numbers::pi;

// Coefficients of √(1 - t) = Σ x_j t^j and 1/√(1 - t) = Σ C_j t^j.
std::vector<double> sqrt_series(int n) {
  std::vector<double> x(n + 1);
  x[0] = 1.0;
  for (int j = 1; j <= n; ++j) x[j] = x[j - 1] * (j - 1.5) / j;
  return x;
}

std::vector<double> inv_sqrt_series(int n) {
  std::vector<double> c(n + 1);
  c[0] = 1.0;
  for (int j = 1; j <= n; ++j) c[j] = c[j - 1] * (2.0 * j - 1.0) / (2.0 * j);
  return c;
}

// For the exterior function X(z) = z^e Σ_j x_j z^{-2j} and its reciprocal
// 1/X(z) = z^{-e} Σ_j y_j z^{-2j}; e = 1 (one cut) or 2 (two cuts).
struct Laurent {
  int e = 1;
  std::vector<double> x;
  std::vector<double> y;
};

Laurent exterior_series(const SupportGeometry& s, int terms) {
  Laurent out;
  const auto xs = sqrt_series(terms);
  const auto cs = inv_sqrt_series(terms);
  out.x.assign(terms + 1, 0.0);
  out.y.assign(terms + 1, 0.0);
  if (s.kind == SupportKind::OneCut) {
    out.e = 1;
    const double a2 = s.a * s.a;
    double pw = 1.0;
    for (int j = 0; j <= terms; ++j, pw *= a2) {
      out.x[j] = xs[j] * pw;
      out.y[j] = cs[j] * pw;
    }
  } else {
    out.e = 2;
    const double s1 = s.a * s.a;
    const double s2 = s.b * s.b;
    for (int j = 0; j <= terms; ++j) {
      double accx = 0.0;
      double accy = 0.0;
      for (int i = 0; i <= j; ++i) {
        const double w = std::pow(s1, i) * std::pow(s2, j - i);
        accx += xs[i] * xs[j - i] * w;
        accy += cs[i] * cs[j - i] * w;
      }
      out.x[j] = accx;
      out.y[j] = accy;
    }
  }
  return out;
}

// Coefficient of z^p in V'(z)/X(z).
double ratio_coefficient(const std::vector<double>& v, const Laurent& L, int p) {
  double acc = 0.0;
  for (std::size_t m = 0; m < v.size(); ++m) {
    const int twice_j = static_cast<int>(m) - L.e - p;
    if (twice_j < 0 || twice_j % 2 != 0) continue;
    const int j = twice_j / 2;
    if (j < static_cast<int>(L.y.size())) acc += v[m] * L.y[j];
  }
  return acc;
}

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::complex<double> horner(const std::vector<double>& c, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

// Solve the 2×2 system J·d = -r.
bool solve2(const std::array<double, 4>& J, const std::array<double, 2>& r, std::array<double, 2>& d) {
  const double det = J[0] * J[3] - J[1] * J[2];
  if (!std::isfinite(det) || det == 0.0) return false;
  d[0] = -(J[3] * r[0] - J[1] * r[1]) / det;
  d[1] = -(-J[2] * r[0] + J[0] * r[1]) / det;
  return std::isfinite(d[0]) && std::isfinite(d[1]);
}

// Damped Newton for a 2-unknown system; `admissible` rejects steps leaving
// the domain. Returns true when the residual norm drops below tol.
template <class F, class A>
bool newton2(F residual_and_jacobian, A admissible, std::array<double, 2>& u, double tol) {
  std::array<double, 2> r{};
  std::array<double, 4> J{};
  residual_and_jacobian(u, r, J);
  double norm = std::hypot(r[0], r[1]);
  for (int it = 0; it < 200 && norm > tol; ++it) {
    std::array<double, 2> d{};
    if (!solve2(J, r, d)) return false;
    double step = 1.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k, step *= 0.5) {
      std::array<double, 2> trial{u[0] + step * d[0], u[1] + step * d[1]};
      if (!admissible(trial)) continue;
      std::array<double, 2> rt{};
      std::array<double, 4> Jt{};
      residual_and_jacobian(trial, rt, Jt);
      const double nt = std::hypot(rt[0], rt[1]);
      if (std::isfinite(nt) && (nt < norm || nt <= tol)) {
        u = trial;
        r = rt;
        J = Jt;
        norm = nt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return norm <= tol;
}

// The integrator extends its abscissa tables lazily, so each thread owns one.
boost::math::quadrature::tanh_sinh<double>& integrator() {
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  return ts;
}

struct Validation {
  bool ok = true;
  bool non_generic = false;
  std::string reason;
};

}  // namespace

std::string to_string(SupportKind kind) { return kind == SupportKind::OneCut ? "OneCut" : "TwoCut"; }
std::string to_string(EdgeSide side) { return side == EdgeSide::Right ? "right" : "left"; }

std::vector<double> master_polynomial(const Potential& potential, const SupportGeometry& support) {
  const Potential w = support.shift == 0.0 ? potential : potential.centered(support.shift);
  const auto v = w.derivative_coefficients();
  const int d = w.degree();
  const auto L = exterior_series(support, d + 2);
  const int deg_p = d - 1 - L.e;
  std::vector<double> p(std::max(deg_p + 1, 1), 0.0);
  for (int k = 0; k <= deg_p; ++k) p[k] = ratio_coefficient(v, L, k);
  // parity is exact for even potentials with symmetric support
  if (w.is_even()) {
    for (int k = (L.e == 1 ? 1 : 0); k <= deg_p; k += 2) p[k] = 0.0;
  }
  return p;
}

EquilibriumMeasure::EquilibriumMeasure(const Potential& potential, SupportGeometry support)
    : potential_(potential),
      centered_(support.shift == 0.0 ? potential : potential.centered(support.shift)),
      support_(support),
      p_(master_polynomial(potential, support)) {
  if (!(support_.a > 0.0) || (support_.kind == SupportKind::TwoCut && !(support_.b > support_.a))) {
    throw Error(ErrorKind::InvalidInput, "equilibrium: invalid support geometry");
  }
  if (support_.kind == SupportKind::TwoCut && !potential_.is_even()) {
    throw Error(ErrorKind::InvalidInput, "equilibrium: two-cut supports require an even potential");
  }
}

std::vector<double> EquilibriumMeasure::endpoints() const {
  const double s = support_.shift;
  if (support_.kind == SupportKind::OneCut) return {s - support_.a, s + support_.a};
  return {s - support_.b, s - support_.a, s + support_.a, s + support_.b};
}

double EquilibriumMeasure::right_endpoint() const { return endpoints().back(); }
double EquilibriumMeasure::left_endpoint() const { return endpoints().front(); }

std::vector<std::pair<double, double>> EquilibriumMeasure::intervals() const {
  const auto e = endpoints();
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < e.size(); i += 2) out.emplace_back(e[i], e[i + 1]);
  return out;
}

double EquilibriumMeasure::master_p(double lambda) const { return horner(p_, lambda - support_.shift); }

std::complex<double> EquilibriumMeasure::master_p(std::complex<double> z) const {
  return horner(p_, z - support_.shift);
}

std::complex<double> EquilibriumMeasure::x_exterior(std::complex<double> mu) const {
  const double a = support_.a;
  std::complex<double> x = std::sqrt(mu - a) * std::sqrt(mu + a);
  if (support_.kind == SupportKind::TwoCut) {
    const double b = support_.b;
    x *= std::sqrt(mu - b) * std::sqrt(mu + b);
  }
  return x;
}

double EquilibriumMeasure::x_plus(double mu) const {
  const double a = support_.a;
  if (support_.kind == SupportKind::OneCut) {
    if (std::abs(mu) >= a) return 0.0;
    return std::sqrt(a - mu) * std::sqrt(a + mu);
  }
  const double b = support_.b;
  const double am = std::abs(mu);
  if (am <= a || am >= b) return 0.0;
  const double r = std::sqrt(am - a) * std::sqrt(am + a) * std::sqrt(b - am) * std::sqrt(b + am);
  return mu > 0 ? r : -r;
}

double EquilibriumMeasure::density(double lambda) const {
  const double mu = lambda - support_.shift;
  const double xp = x_plus(mu);
  if (xp == 0.0) return 0.0;
  return horner(p_, mu) * xp / (2.0 * kPi);
}

double EquilibriumMeasure::edge_amplitude(double endpoint) const {
  const double e = endpoint - support_.shift;
  const auto ends = endpoints();
  double prod = 1.0;
  for (double other : ends) {
    const double o = other - support_.shift;
    if (std::abs(o - e) > 1e-14 * std::max(1.0, std::abs(e))) prod *= std::abs(e - o);
  }
  double sign = 1.0;
  if (support_.kind == SupportKind::TwoCut && e < 0) sign = -1.0;
  return sign * horner(p_, e) * std::sqrt(prod) / (2.0 * kPi);
}

std::complex<double> EquilibriumMeasure::stieltjes(std::complex<double> z) const {
  const std::complex<double> mu = z - support_.shift;
  if (mu.imag() == 0.0 && x_plus(mu.real()) != 0.0) {
    throw Error(ErrorKind::InvalidInput, "stieltjes: real argument inside the support");
  }
  const std::complex<double> vp = centered_.evaluate(mu, 1);
  const std::complex<double> px = horner(p_, mu) * x_exterior(mu);
  const std::complex<double> g = 0.5 * (vp - px);
  // Far from the support V' and PX nearly cancel; the other root of
  // g² - V'g + 𝒬 = 0 is then large and g = 2𝒬/(V' + PX) is cancellation free.
  if (std::abs(g) < 0.25 * std::abs(vp)) return 2.0 * q_function(z) / (vp + px);
  return g;
}

std::vector<double> EquilibriumMeasure::moments(int kmax) const {
  const int deg_p = static_cast<int>(p_.size()) - 1;
  const auto L = exterior_series(support_, (kmax + deg_p + 4) / 2 + 2);
  std::vector<double> centered(kmax + 1, 0.0);
  for (int k = 0; k <= kmax; ++k) {
    double acc = 0.0;
    for (int i = 0; i <= deg_p; ++i) {
      const int twice_j = i + L.e + k + 1;
      if (twice_j % 2 != 0) continue;
      const int j = twice_j / 2;
      if (j < static_cast<int>(L.x.size())) acc += p_[i] * L.x[j];
    }
    centered[k] = -0.5 * acc;
  }
  if (support_.shift == 0.0) return centered;
  std::vector<double> out(kmax + 1, 0.0);
  const double s = support_.shift;
  for (int k = 0; k <= kmax; ++k) {
    double binom = 1.0;
    for (int i = 0; i <= k; ++i) {
      out[k] += binom * std::pow(s, k - i) * centered[i];
      binom = binom * (k - i) / (i + 1);
    }
  }
  return out;
}

std::complex<double> EquilibriumMeasure::q_function(std::complex<double> z) const {
  const auto v = potential_.derivative_coefficients();
  const auto mom = moments(static_cast<int>(v.size()));
  std::complex<double> acc = 0.0;
  for (std::size_t m = 1; m < v.size(); ++m) {
    std::complex<double> zi = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      acc += v[m] * zi * mom[m - 1 - i];
      zi *= z;
    }
  }
  return acc;
}

double log_potential(const std::function<double(double)>& rho,
                     const std::vector<std::pair<double, double>>& intervals, double lambda) {
  auto& ts = integrator();
  double total = 0.0;
  for (const auto& [lo, hi] : intervals) {
    const double m = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    auto f = [&](double theta) {
      const double mu = m + h * std::cos(theta);
      const double diff = std::abs(mu - lambda);
      if (diff == 0.0) return 0.0;
      return std::log(diff) * rho(mu) * h * std::sin(theta);
    };
    if (lambda > lo && lambda < hi) {
      const double theta0 = std::acos(std::clamp((lambda - m) / h, -1.0, 1.0));
      total += ts.integrate(f, 0.0, theta0, 1e-12) + ts.integrate(f, theta0, kPi, 1e-12);
    } else {
      total += ts.integrate(f, 0.0, kPi, 1e-12);
    }
  }
  return total;
}

double log_energy(const std::function<double(double)>& rho,
                  const std::vector<std::pair<double, double>>& intervals, const Potential& potential) {
  auto& ts = integrator();
  double total = 0.0;
  for (const auto& [lo, hi] : intervals) {
    const double m = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    auto f = [&](double theta) {
      const double lambda = m + h * std::cos(theta);
      const double r = rho(lambda);
      if (r == 0.0) return 0.0;
      return r * (potential.value(lambda) - log_potential(rho, intervals, lambda)) * h * std::sin(theta);
    };
    total += ts.integrate(f, 0.0, kPi, 1e-10);
  }
  return total;
}

double EquilibriumMeasure::effective_potential(double lambda) const {
  auto rho = [this](double x) { return density(x); };
  return 2.0 * log_potential(rho, intervals(), lambda) - potential_.value(lambda);
}

double EquilibriumMeasure::energy() const {
  auto rho = [this](double x) { return density(x); };
  return log_energy(rho, intervals(), potential_);
}

EdgeConstants EquilibriumMeasure::edge_constants(std::size_t endpoint_index) const {
  const auto ends = endpoints();
  if (endpoint_index >= ends.size()) {
    throw Error(ErrorKind::InvalidInput, "edge_constants: endpoint index out of range");
  }
  EdgeConstants ec;
  ec.endpoint = ends[endpoint_index];
  ec.side = (endpoint_index % 2 == 0) ? EdgeSide::Left : EdgeSide::Right;
  const double e = ec.endpoint - support_.shift;
  const double pe = horner(p_, e);
  if (edge_amplitude(ec.endpoint) <= 0.0) {
    std::ostringstream os;
    os << "edge_constants: non-generic edge at " << ec.endpoint << " (P(a*) = " << pe << ")";
    throw Error(ErrorKind::NonGeneric, os.str());
  }
  if (support_.kind == SupportKind::OneCut) {
    ec.c = 1.0 / (support_.a * pe);
    ec.alpha = support_.a;
  } else {
    const double gap = support_.b * support_.b - support_.a * support_.a;
    ec.c = 1.0 / (gap * std::abs(pe));
    ec.alpha = gap / std::abs(e);
  }
  ec.gamma = std::cbrt(1.0 / (2.0 * ec.c * ec.c * ec.alpha));
  ec.kappa = std::cbrt(4.0 * ec.c / ec.alpha);
  return ec;
}

double EquilibriumMeasure::recurrence_slope() const {
  if (support_.kind != SupportKind::OneCut) {
    throw Error(ErrorKind::InvalidInput, "recurrence_slope: defined for one-cut supports only");
  }
  const double a = support_.a;
  return (1.0 / horner(p_, a) + 1.0 / horner(p_, -a)) / (2.0 * a);
}

namespace {

// Residuals of the endpoint conditions for a given geometry, in the centered
// variable: the z^{-1}, ..., z^{-e} coefficients of V'/X vanish and the
// z^{-e-1} coefficient equals 2.
double max_condition_residual(const Potential& centered, const SupportGeometry& g) {
  const auto v = centered.derivative_coefficients();
  const auto L = exterior_series(g, centered.degree() + 2);
  double r = 0.0;
  double scale = 2.0;
  for (std::size_t m = 0; m < v.size(); ++m) scale = std::max(scale, std::abs(v[m]));
  for (int p = 1; p <= L.e; ++p) r = std::max(r, std::abs(ratio_coefficient(v, L, -p)));
  r = std::max(r, std::abs(ratio_coefficient(v, L, -L.e - 1) - 2.0));
  return r / scale;
}

double cauchy_bound(const std::vector<double>& c) {
  double lead = 0.0;
  std::size_t top = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] != 0.0) top = i, lead = c[i];
  }
  if (top == 0) return 1.0;
  double m = 0.0;
  for (std::size_t i = 0; i < top; ++i) m = std::max(m, std::abs(c[i] / lead));
  return 1.0 + m;
}

// Checks ρ ≥ 0, positive edge amplitudes and the inequality u ≤ const off σ.
Validation validate(const Potential& potential, const SupportGeometry& g) {
  Validation out;
  EquilibriumMeasure eq(potential, g);
  const auto ivs = eq.intervals();
  const auto& p = eq.p_coeffs();
  double pscale = 0.0;
  for (double c : p) pscale = std::max(pscale, std::abs(c));
  for (const auto& [lo, hi] : ivs) {
    for (int i = 1; i < 2000; ++i) {
      const double x = lo + (hi - lo) * i / 2000.0;
      if (eq.density(x) < -1e-12 * std::max(1.0, pscale)) {
        out.ok = false;
        std::ostringstream os;
        os << "negative density " << eq.density(x) << " at " << x;
        out.reason = os.str();
        return out;
      }
    }
  }
  for (double e : eq.endpoints()) {
    if (!(eq.edge_amplitude(e) > 1e-10)) {
      out.ok = false;
      out.non_generic = true;
      std::ostringstream os;
      os << "non-generic edge at " << e << " (P(a*) = " << eq.master_p(e) << ")";
      out.reason = os.str();
      return out;
    }
  }
  // u'(λ) = -P(λ)X(λ) off the support (X real there). Integrate outward from
  // each adjacent endpoint and require u(λ) ≤ u(endpoint).
  const double shift = g.shift;
  auto du = [&](double lambda) {
    const double mu = lambda - shift;
    const std::complex<double> z(mu, 0.0);
    std::complex<double> x = std::sqrt(z - g.a) * std::sqrt(z + g.a);
    if (g.kind == SupportKind::TwoCut) x *= std::sqrt(z - g.b) * std::sqrt(z + g.b);
    return -horner(p, mu) * x.real();
  };
  const auto ends = eq.endpoints();
  const double reach = std::max(cauchy_bound(p), std::abs(ends.back() - shift)) + 1.0;
  std::vector<std::pair<double, double>> legs;  // (start endpoint, far point)
  legs.emplace_back(ends.back(), shift + 2.0 * reach);
  legs.emplace_back(ends.front(), shift - 2.0 * reach);
  for (std::size_t i = 1; i + 1 < ends.size(); i += 2) {
    const double mid = 0.5 * (ends[i] + ends[i + 1]);
    legs.emplace_back(ends[i], mid);
    legs.emplace_back(ends[i + 1], mid);
  }
  for (const auto& [start, stop] : legs) {
    const int panels = 200;
    const double h = (stop - start) / panels;
    double acc = 0.0;
    for (int k = 0; k < panels; ++k) {
      const auto r = gauss_legendre(8, start + k * h, start + (k + 1) * h);
      for (std::size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * du(r.nodes[i]);
      if (acc > 1e-9) {
        out.ok = false;
        std::ostringstream os;
        os << "variational inequality violated near " << start + (k + 1) * h;
        out.reason = os.str();
        return out;
      }
    }
  }
  return out;
}

std::vector<SupportGeometry> one_cut_candidates(const Potential& potential) {
  std::vector<SupportGeometry> out;
  const int d = potential.degree();
  const auto cs = inv_sqrt_series(d);
  if (potential.is_even()) {
    // Σ_{j≥1} v_{2j-1} C_j s^j = 2 is a polynomial in s = a².
    const auto v = potential.derivative_coefficients();
    std::vector<double> f(d / 2 + 1, 0.0);
    f[0] = -2.0;
    for (int j = 1; 2 * j - 1 < static_cast<int>(v.size()); ++j) f[j] = v[2 * j - 1] * cs[j];
    const double bound = cauchy_bound(f);
    const int samples = 20000;
    double prev_s = 0.0;
    double prev_f = horner(f, 0.0);
    for (int i = 1; i <= samples; ++i) {
      const double s = bound * i / samples;
      const double fs = horner(f, s);
      if ((prev_f < 0.0) != (fs < 0.0) || fs == 0.0) {
        double lo = prev_s, hi = s;
        const bool lo_neg = prev_f < 0.0;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          ((horner(f, mid) < 0.0) == lo_neg ? lo : hi) = mid;
        }
        const double root = 0.5 * (lo + hi);
        if (root > 0.0) out.push_back({SupportKind::OneCut, std::sqrt(root), 0.0, 0.0});
      }
      prev_s = s;
      prev_f = fs;
    }
    return out;
  }
  // General one-cut: unknowns (a, shift).
  const double a0 = std::pow(2.0 / (d * potential.coefficients().back() * cs[d / 2]), 1.0 / d);
  auto system = [&](const std::array<double, 2>& u, std::array<double, 2>& r, std::array<double, 4>& J) {
    const double a = u[0];
    const auto v = potential.centered(u[1]).derivative_coefficients();
    std::vector<double> dv(v.size(), 0.0);
    for (std::size_t m = 0; m + 1 < v.size(); ++m) dv[m] = (m + 1.0) * v[m + 1];
    r = {0.0, -2.0};
    J = {0.0, 0.0, 0.0, 0.0};
    for (int j = 0; j <= d / 2; ++j) {
      const double y = cs[j] * std::pow(a, 2 * j);
      const double dy = j > 0 ? cs[j] * 2.0 * j * std::pow(a, 2 * j - 1) : 0.0;
      if (2 * j < static_cast<int>(v.size())) {
        r[0] += v[2 * j] * y;
        J[0] += v[2 * j] * dy;
        J[1] += dv[2 * j] * y;
      }
      if (j >= 1 && 2 * j - 1 < static_cast<int>(v.size())) {
        r[1] += v[2 * j - 1] * y;
        J[2] += v[2 * j - 1] * dy;
        J[3] += dv[2 * j - 1] * y;
      }
    }
  };
  auto admissible = [](const std::array<double, 2>& u) { return u[0] > 0.0; };
  const double beta_min = potential.minimum().first;
  for (double beta0 : {beta_min, 0.0}) {
    for (double f : {1.0, 0.5, 0.75, 1.5, 2.0, 3.0}) {
      std::array<double, 2> u{a0 * f, beta0};
      if (newton2(system, admissible, u, 1e-13)) {
        out.push_back({SupportKind::OneCut, u[0], 0.0, u[1]});
      }
    }
  }
  return out;
}

std::vector<SupportGeometry> two_cut_candidates(const Potential& potential) {
  std::vector<SupportGeometry> out;
  const auto v = potential.derivative_coefficients();
  const int d = potential.degree();
  const auto cs = inv_sqrt_series(d);
  auto system = [&](const std::array<double, 2>& u, std::array<double, 2>& r, std::array<double, 4>& J) {
    const double s1 = u[0], s2 = u[1];
    r = {0.0, -2.0};
    J = {0.0, 0.0, 0.0, 0.0};
    for (int j = 0; j <= d / 2; ++j) {
      double D = 0.0, D1 = 0.0, D2 = 0.0;
      for (int i = 0; i <= j; ++i) {
        const int k = j - i;
        const double w = cs[i] * cs[k];
        D += w * std::pow(s1, i) * std::pow(s2, k);
        if (i > 0) D1 += w * i * std::pow(s1, i - 1) * std::pow(s2, k);
        if (k > 0) D2 += w * k * std::pow(s1, i) * std::pow(s2, k - 1);
      }
      if (2 * j + 1 < static_cast<int>(v.size())) {
        r[0] += v[2 * j + 1] * D;
        J[0] += v[2 * j + 1] * D1;
        J[1] += v[2 * j + 1] * D2;
      }
      if (j >= 1 && 2 * j - 1 < static_cast<int>(v.size())) {
        r[1] += v[2 * j - 1] * D;
        J[2] += v[2 * j - 1] * D1;
        J[3] += v[2 * j - 1] * D2;
      }
    }
  };
  auto admissible = [](const std::array<double, 2>& u) { return u[0] > 0.0 && u[1] > u[0]; };
  const double lm = std::abs(potential.minimum().first);
  const double l2 = lm > 0.0 ? lm * lm : 1.0;
  for (double f1 : {0.1, 0.3, 0.5, 0.7}) {
    for (double f2 : {1.2, 1.5, 2.0, 3.0}) {
      std::array<double, 2> u{f1 * l2, f2 * l2};
      if (newton2(system, admissible, u, 1e-13)) {
        out.push_back({SupportKind::TwoCut, std::sqrt(u[0]), std::sqrt(u[1]), 0.0});
      }
    }
  }
  return out;
}

}  // namespace

SupportGeometry solve_support(const Potential& potential, KindHint hint) {
  if (hint == KindHint::TwoCut && !potential.is_even()) {
    throw Error(ErrorKind::InvalidInput, "solve_support: two-cut mode requires an even potential");
  }
  std::vector<std::string> reasons;
  bool saw_non_generic = false;
  auto try_kind = [&](SupportKind kind, SupportGeometry& found) {
    const auto cands = kind == SupportKind::OneCut ? one_cut_candidates(potential) : two_cut_candidates(potential);
    if (cands.empty()) reasons.push_back(to_string(kind) + ": endpoint iteration did not converge");
    for (const auto& g : cands) {
      const Potential w = g.shift == 0.0 ? potential : potential.centered(g.shift);
      if (max_condition_residual(w, g) > 1e-10) continue;
      const auto val = validate(potential, g);
      if (val.ok) {
        found = g;
        return true;
      }
      saw_non_generic = saw_non_generic || val.non_generic;
      reasons.push_back(to_string(kind) + " candidate rejected: " + val.reason);
    }
    return false;
  };
  SupportGeometry g;
  if (hint != KindHint::TwoCut && try_kind(SupportKind::OneCut, g)) return g;
  if ((hint == KindHint::TwoCut || (hint == KindHint::Auto && potential.is_even())) &&
      try_kind(SupportKind::TwoCut, g)) {
    return g;
  }
  std::string msg = "solve_support: no admissible support for " + potential.to_spec();
  for (const auto& r : reasons) msg += "; " + r;
  if (saw_non_generic) throw Error(ErrorKind::NonGeneric, msg);
  throw Error(ErrorKind::NoConvergence, msg);
}

EquilibriumMeasure solve_equilibrium(const Potential& potential, KindHint hint) {
  return EquilibriumMeasure(potential, solve_support(potential, hint));
}

SupportGeometry deformed_support(const Potential& potential, double delta) {
  if (!(delta > 0.0 && delta < 0.5)) {
    throw Error(ErrorKind::InvalidInput, "deformed_support: delta must lie in (0, 1/2)");
  }
  return solve_support(potential.scaled(1.0 / (1.0 - delta)));
}

}  // namespace edgelab
