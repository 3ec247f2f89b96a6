#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "check.hpp"
#include "doctest.h"
#include "edgelab/equilibrium.hpp"
#include "oracles/special.hpp"

using namespace edgelab;
using cd = std::complex<double>;
using std::numbers::pi;

namespace {

const Potential kGue = parse_potential("poly:0,0,2");
const Potential kQuartic = parse_potential("poly:0,0,0,0,0.25");
const Potential kDoubleWell = parse_potential("poly:0,0,-2,0,0.25");
const Potential kTilted = parse_potential("poly:0,0.5,0.3,0,0.25");

/// The defining integral of P: (1/π)∫_σ (V'(z) - V'(λ))/(z - λ) dλ / X₊(λ),
/// with the square-root endpoint singularities removed by a cosine map.
double p_by_quadrature(const EquilibriumMeasure& eq, double z) {
  const auto& s = eq.support();
  const Potential& v = eq.potential();
  auto dd = [&](double lambda) { return v.divided_difference(z, lambda).real(); };
  if (s.kind == SupportKind::OneCut) {
    return oracle::integrate([&](double t) { return dd(s.a * std::cos(t) + s.shift); }, 0.0, pi) / pi;
  }
  // μ² = (a² + b²)/2 + (b² - a²)/2·cos θ covers both cuts at once
  const double a2 = s.a * s.a, b2 = s.b * s.b;
  auto f = [&](double t) {
    const double mu = std::sqrt(0.5 * (a2 + b2) + 0.5 * (b2 - a2) * std::cos(t));
    return (dd(mu) - dd(-mu)) / (2.0 * mu);
  };
  return oracle::integrate(f, 0.0, pi) / pi;
}

double mass(const EquilibriumMeasure& eq) {
  double m = 0.0;
  for (auto [lo, hi] : eq.intervals()) m += oracle::integrate([&](double x) { return eq.density(x); }, lo, hi);
  return m;
}

cd stieltjes_by_quadrature(const EquilibriumMeasure& eq, cd z) {
  double re = 0.0, im = 0.0;
  for (auto [lo, hi] : eq.intervals()) {
    re += oracle::integrate([&](double x) { return (eq.density(x) / (z - x)).real(); }, lo, hi);
    im += oracle::integrate([&](double x) { return (eq.density(x) / (z - x)).imag(); }, lo, hi);
  }
  return {re, im};
}

}  // namespace

TEST_CASE("GUE support is the unit semicircle") {
  const auto eq = solve_equilibrium(kGue);
  CHECK(eq.support().kind == SupportKind::OneCut);
  CHECK(std::abs(eq.support().a - 1.0) < 1e-12);
  CHECK(eq.support().shift == 0.0);
  REQUIRE(eq.p_coeffs().size() == 1);
  CHECK(eq.p_coeffs()[0] == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(eq.density(0.0) == doctest::Approx(2.0 / pi).epsilon(1e-14));
  CHECK(eq.density(2.0) == 0.0);
  double worst = 0.0;
  for (double x = -0.99; x <= 0.99; x += 0.001) worst = std::max(worst, std::abs(eq.density(x) - 2.0 / pi * std::sqrt(1 - x * x)));
  CHECK(worst < 1e-12);
}

TEST_CASE("quartic one-cut endpoint and master polynomial") {
  const auto eq = solve_equilibrium(kQuartic);
  const double a = std::pow(16.0 / 3.0, 0.25);
  CHECK(eq.support().kind == SupportKind::OneCut);
  CHECK(std::abs(eq.support().a - a) < 1e-10);
  for (double z : {-1.0, 0.0, 0.7, 2.5}) {
    CHECK(eq.master_p(z) == doctest::Approx(z * z + a * a / 2).epsilon(1e-12));
    CHECK(eq.master_p(z) == doctest::Approx(p_by_quadrature(eq, z)).epsilon(1e-10));
  }
  CHECK(eq.density(0.0) == doctest::Approx(a * a * a / (4 * pi)).epsilon(1e-12));
  CHECK(mass(eq) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("double-well quartic splits into two cuts") {
  const auto eq = solve_equilibrium(kDoubleWell);
  REQUIRE(eq.support().kind == SupportKind::TwoCut);
  CHECK(std::abs(eq.support().a - std::sqrt(2.0)) < 1e-8);
  CHECK(std::abs(eq.support().b - std::sqrt(6.0)) < 1e-8);
  for (double z : {0.3, 1.0, 2.0}) {
    CHECK(eq.master_p(z) == doctest::Approx(z).epsilon(1e-10));
    CHECK(eq.master_p(z) == doctest::Approx(p_by_quadrature(eq, z)).epsilon(1e-8));
  }
  CHECK(eq.density(0.0) == 0.0);
  CHECK(eq.density(-2.0) == doctest::Approx(eq.density(2.0)).epsilon(1e-14));
  CHECK(mass(eq) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(eq.endpoints().size() == 4);
}

TEST_CASE("support kind hints") {
  CHECK(solve_support(kDoubleWell, KindHint::TwoCut).kind == SupportKind::TwoCut);
  auto forced = testing::catch_error([] { solve_support(kDoubleWell, KindHint::OneCut); });
  REQUIRE(forced);
  CHECK((forced->kind == ErrorKind::NonGeneric || forced->kind == ErrorKind::NoConvergence));
  auto odd = testing::catch_error([] { solve_support(kTilted, KindHint::TwoCut); });
  REQUIRE(odd);
  CHECK(odd->kind == ErrorKind::InvalidInput);
}

TEST_CASE("Stieltjes transform closed forms and quadrature") {
  const auto eq = solve_equilibrium(kGue);
  CHECK(std::abs(eq.stieltjes(2.0) - 2.0 * (2.0 - std::sqrt(3.0))) < 1e-14);
  CHECK(std::abs(eq.stieltjes(cd(0, 1)) - cd(0, -2.0 * (std::sqrt(2.0) - 1.0))) < 1e-14);
  CHECK(std::abs(eq.stieltjes(cd(0, 1)) - stieltjes_by_quadrature(eq, cd(0, 1))) < 1e-10);
  CHECK(std::abs(eq.stieltjes(-2.0) + 2.0 * (2.0 - std::sqrt(3.0))) < 1e-14);
  CHECK(testing::catch_error([&] { eq.stieltjes(0.5); }));
  for (const Potential* v : {&kGue, &kQuartic, &kDoubleWell, &kTilted}) {
    const auto e = solve_equilibrium(*v);
    for (cd z : {cd(1e6, 0), cd(0, 1e6), cd(-3e5, 4e5)}) {
      CAPTURE(v->to_spec());
      CAPTURE(z);
      const auto m = e.moments(2);
      CHECK(std::abs(z * e.stieltjes(z) - 1.0 - m[1] / z) < 1e-10);
    }
    for (cd z : {cd(0.3, 0.5), cd(-2.5, 0.1), cd(3.0, -1.0)})
      CHECK(std::abs(e.stieltjes(z) - stieltjes_by_quadrature(e, z)) < 1e-9);
  }
}

TEST_CASE("Stieltjes transform solves its quadratic equation and is Herglotz") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.1, 2.0);
  std::bernoulli_distribution flip(0.5);
  for (const Potential* v : {&kGue, &kQuartic, &kDoubleWell, &kTilted}) {
    const auto e = solve_equilibrium(*v);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const cd z(re(rng), flip(rng) ? im(rng) : -im(rng));
      const cd g = e.stieltjes(z);
      const cd vp = v->evaluate(z, 1);
      worst = std::max(worst, std::abs(g * g - vp * g + e.q_function(z)));
      CHECK(g.imag() * z.imag() < 0.0);  // g = ∫ρ/(z - μ) maps the upper half plane down
    }
    CHECK(worst <= 1e-8);
  }
  const auto gue = solve_equilibrium(kGue);
  const cd z(1, 1);
  const cd g = gue.stieltjes(z);
  CHECK(std::abs(g * g - 4.0 * z * g + gue.q_function(z)) <= 1e-12);
}

TEST_CASE("q-function from moments") {
  const auto gue = solve_equilibrium(kGue);
  for (cd z : {cd(0), cd(2, 1), cd(-5, 0)}) CHECK(std::abs(gue.q_function(z) - 4.0) < 1e-13);
  const auto q = solve_equilibrium(kQuartic);
  const double m2 = oracle::integrate([&](double x) { return x * x * q.density(x); }, -q.support().a, q.support().a);
  CHECK(q.q_function(0.0).real() == doctest::Approx(m2).epsilon(1e-10));
  const auto mom = q.moments(4);
  CHECK(mom[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(mom[1]) < 1e-14);
  CHECK(mom[2] == doctest::Approx(m2).epsilon(1e-10));
}

TEST_CASE("density invariants: non-negativity and square-root edges") {
  for (const Potential* v : {&kGue, &kQuartic, &kDoubleWell, &kTilted}) {
    const auto e = solve_equilibrium(*v);
    CHECK(mass(e) == doctest::Approx(1.0).epsilon(1e-10));
    const double lo = e.left_endpoint() - 0.5, hi = e.right_endpoint() + 0.5;
    double minimum = 0.0;
    for (int i = 0; i <= 20000; ++i) minimum = std::min(minimum, e.density(lo + (hi - lo) * i / 20000.0));
    CHECK(minimum >= -1e-12);
    for (double ep : e.endpoints()) {
      // step into the support from each endpoint
      const bool inside_right = e.density(ep + 1e-3) > 0.0;
      std::vector<double> ratios;
      for (double d : {1e-2, 1e-3, 1e-4}) {
        const double x = inside_right ? ep + d : ep - d;
        ratios.push_back(e.density(x) / std::sqrt(d));
      }
      CHECK(ratios[0] > 0.0);
      CHECK(std::abs(ratios[1] / ratios[0] - 1.0) < 0.05);
      CHECK(std::abs(ratios[2] / ratios[0] - 1.0) < 0.05);
      CHECK(ratios[2] == doctest::Approx(e.edge_amplitude(ep)).epsilon(1e-3));
    }
    // genericity: P·sign(X₊) is positive at every endpoint
    for (double p : e.endpoints()) {
      const double sign = e.support().kind == SupportKind::TwoCut && p < 0 ? -1.0 : 1.0;
      CHECK(sign * e.master_p(p) > 0.0);
    }
  }
  CHECK(solve_equilibrium(kQuartic).support().shift == 0.0);
}

TEST_CASE("non-symmetric one-cut support is centered") {
  const auto e = solve_equilibrium(kTilted);
  CHECK(e.support().kind == SupportKind::OneCut);
  CHECK(e.support().shift != 0.0);
  const auto ends = e.endpoints();
  CHECK((ends[0] + ends[1]) / 2 == doctest::Approx(e.support().shift).epsilon(1e-14));
  CHECK(e.density(ends[0] - 1e-9) == 0.0);
  // u is flat on the support
  CHECK(e.effective_potential(ends[0] + 0.3) == doctest::Approx(e.effective_potential(ends[1] - 0.4)).epsilon(1e-8));
}

TEST_CASE("effective potential is maximal and flat on the support") {
  const auto e = solve_equilibrium(kGue);
  CHECK(std::abs(e.effective_potential(0.5) - e.effective_potential(0.2)) < 1e-9);
  CHECK(e.effective_potential(1.5) < e.effective_potential(0.0));
  CHECK(std::abs(e.effective_potential(0.3) - e.effective_potential(-0.3)) < 1e-10);
  // closed form on the support: u = -1 - 2 log 2 for the unit semicircle
  CHECK(e.effective_potential(0.0) == doctest::Approx(-1.0 - 2.0 * std::log(2.0)).epsilon(1e-10));
  const double u_off = 2.0 * oracle::integrate([&](double m) { return std::log(std::abs(m - 1.5)) * e.density(m); }, -1, 1) -
                       kGue.value(1.5);
  CHECK(e.effective_potential(1.5) == doctest::Approx(u_off).epsilon(1e-10));

  const auto dw = solve_equilibrium(kDoubleWell);
  const double on = dw.effective_potential(2.0);
  CHECK(dw.effective_potential(1.7) == doctest::Approx(on).epsilon(1e-8));
  CHECK(dw.effective_potential(0.0) < on);
  CHECK(dw.effective_potential(3.0) < on);
}

TEST_CASE("edge constants") {
  const auto gue = solve_equilibrium(kGue);
  const auto r = gue.right_edge();
  CHECK(r.endpoint == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.side == EdgeSide::Right);
  CHECK(r.c == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(r.alpha == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.gamma == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(r.kappa == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(gue.left_edge().side == EdgeSide::Left);
  CHECK(gue.recurrence_slope() == doctest::Approx(0.25).epsilon(1e-14));

  const auto dw = solve_equilibrium(kDoubleWell);
  const auto b = dw.right_edge();
  const double s6 = std::sqrt(6.0);
  CHECK(b.endpoint == doctest::Approx(s6).epsilon(1e-10));
  // c = 1/((b² - a²)P(b)): the factor that makes γ^{3/2} equal π times the
  // square-root amplitude of ρ at the edge, as at every one-cut edge
  CHECK(b.c == doctest::Approx(1.0 / (4.0 * s6)).epsilon(1e-8));
  CHECK(b.alpha == doctest::Approx(4.0 / s6).epsilon(1e-8));
  CHECK(b.c == doctest::Approx(1.0 / (4.0 * p_by_quadrature(dw, s6))).epsilon(1e-8));
  CHECK(testing::catch_error([&] { dw.edge_constants(4); }));
  CHECK(testing::catch_error([&] { dw.recurrence_slope(); }));

  for (const Potential* v : {&kGue, &kQuartic, &kDoubleWell, &kTilted}) {
    const auto e = solve_equilibrium(*v);
    for (std::size_t i = 0; i < e.endpoints().size(); ++i) {
      const auto k = e.edge_constants(i);
      CHECK(k.gamma == doctest::Approx(std::pow(2 * k.c * k.c * k.alpha, -1.0 / 3.0)).epsilon(1e-14));
      CHECK(k.kappa == doctest::Approx(std::cbrt(4 * k.c / k.alpha)).epsilon(1e-14));
      CHECK(std::pow(k.gamma, 1.5) == doctest::Approx(pi * e.edge_amplitude(k.endpoint)).epsilon(1e-10));
    }
  }
}

TEST_CASE("energy minimality and Monte-Carlo value") {
  const auto gue = solve_equilibrium(kGue);
  const double exact = 0.75 + std::log(2.0);
  CHECK(gue.energy() == doctest::Approx(exact).epsilon(1e-10));
  const double mc = oracle::gue_energy_monte_carlo(4'000'000, 20240917);
  CHECK(std::abs(gue.energy() - mc) < 1.5e-3);

  const double uniform = log_energy([](double) { return 0.5; }, {{-1.0, 1.0}}, kGue);
  CHECK(uniform == doctest::Approx(1.5 - std::log(2.0) + 2.0 / 3.0).epsilon(1e-9));
  CHECK(gue.energy() < uniform);
  // any normalized competitor loses, also a wider semicircle
  const double wide = log_energy([](double x) { return std::abs(x) < 1.2 ? 2 / (pi * 1.44) * std::sqrt(1.44 - x * x) : 0.0; },
                                 {{-1.2, 1.2}}, kGue);
  CHECK(gue.energy() < wide);

  for (const Potential* v : {&kQuartic, &kDoubleWell}) CHECK(std::isfinite(solve_equilibrium(*v).energy()));
}

TEST_CASE("deformed support shrinks strictly") {
  const auto d = deformed_support(kGue, 0.1);
  CHECK(d.a == doctest::Approx(std::sqrt(0.9)).epsilon(1e-12));
  for (const Potential* v : {&kGue, &kQuartic, &kTilted}) {
    const auto s = solve_support(*v);
    for (double delta : {0.01, 0.1, 0.4}) CHECK(deformed_support(*v, delta).a < s.a);
  }
  const auto s = solve_support(kDoubleWell);
  CHECK(deformed_support(kDoubleWell, 0.05).b < s.b);
  const double k1 = (1.0 - deformed_support(kGue, 0.02).a) / 0.02;
  const double k2 = (1.0 - deformed_support(kGue, 0.01).a) / 0.01;
  CHECK(std::abs(k2 - 0.5) < std::abs(k1 - 0.5));
  CHECK(std::abs(k1 / k2 - 1.0) < 0.05);
  CHECK(testing::catch_error([] { deformed_support(kGue, 0.0); }));
  CHECK(testing::catch_error([] { deformed_support(kGue, 0.5); }));
}

