#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "check.hpp"
#include "doctest.h"
#include "edgelab/airy.hpp"
#include "oracles/special.hpp"

using namespace edgelab;
using cd = std::complex<double>;
using std::numbers::pi;

namespace {

/// Ninth-order-accurate central difference of f at x.
template <class F>
double derivative9(F f, double x, double h) {
  static constexpr double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  double s = 0.0;
  for (int k = 1; k <= 4; ++k) s += c[k - 1] * (f(x + k * h) - f(x - k * h));
  return s / h;
}

/// Fourth-order second difference in x of a complex function.
template <class F>
cd second_difference5(F f, double x, double h) {
  return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)) / (12.0 * h * h);
}

/// Composite Gauss–Legendre integral with panel width shrinking like the
/// local wavelength of Ai at X = κx + γξ.
double oscillatory_integral(const std::function<double(double)>& f, double lo, double hi,
                            const std::function<double(double)>& local_scale) {
  const auto [x, w] = oracle::legendre_rule(24, -1.0, 1.0);
  double total = 0.0;
  for (double a = lo; a < hi;) {
    const double b = std::min(hi, a + local_scale(a));
    for (std::size_t i = 0; i < x.size(); ++i) total += 0.5 * (b - a) * w[i] * f(0.5 * (b - a) * x[i] + 0.5 * (b + a));
    a = b;
  }
  return total;
}

}  // namespace

TEST_CASE("Airy values at the origin") {
  const auto a0 = airy_ai(0.0);
  CHECK(a0.value == doctest::Approx(std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0)).epsilon(1e-15));
  CHECK(a0.derivative == doctest::Approx(-std::pow(3.0, -1.0 / 3.0) / std::tgamma(1.0 / 3.0)).epsilon(1e-15));
  CHECK(a0.value == doctest::Approx(0.3550280539).epsilon(1e-10));
  CHECK(a0.derivative == doctest::Approx(-0.2588194038).epsilon(1e-10));
  const auto b0 = airy_bi(0.0);
  CHECK(b0.value == doctest::Approx(std::sqrt(3.0) * a0.value).epsilon(1e-15));
}

TEST_CASE("Airy functions agree with Boost on the real line") {
  for (double x = -30.0; x <= 30.0; x += 0.037) {
    CAPTURE(x);
    const auto a = airy_ai(x);
    const auto b = airy_bi(x);
    const double scale = std::max(1.0, std::pow(std::abs(x), 0.25));
    if (x < 5) {
      CHECK(std::abs(a.value - oracle::ai(x)) <= 1e-13 * scale);
      CHECK(std::abs(a.derivative - oracle::aip(x)) <= 1e-13 * scale * std::sqrt(std::abs(x) + 1));
    } else {
      CHECK(a.value == doctest::Approx(oracle::ai(x)).epsilon(1e-12));
      CHECK(a.derivative == doctest::Approx(oracle::aip(x)).epsilon(1e-12));
    }
    if (x < 25) {
      CHECK(b.value == doctest::Approx(oracle::bi(x)).epsilon(1e-12).scale(scale));
      CHECK(b.derivative == doctest::Approx(oracle::bip(x)).epsilon(1e-12).scale(scale * std::sqrt(std::abs(x) + 1)));
    }
  }
}

TEST_CASE("Airy differential equation residual") {
  double worst = 0.0;
  for (double x = -8.0; x <= 8.0; x += 0.05) {
    const double second = derivative9([](double t) { return airy_ai(t).derivative; }, x, 0.04);
    worst = std::max(worst, std::abs(second - x * airy_ai(x).value));
  }
  CHECK(worst < 1e-9);
  // the complex evaluator satisfies the same equation off the axis
  for (cd z : {cd(1.0, 2.0), cd(-3.0, 0.5), cd(6.0, -4.0)}) {
    const double h = 1e-3;
    const cd d2 = (airy_eval(z + h, AiryFunction::Ai, 1) - airy_eval(z - h, AiryFunction::Ai, 1)) / (2 * h);
    CHECK(std::abs(d2 - z * airy_eval(z, AiryFunction::Ai, 0)) < 1e-5 * std::max(1.0, std::abs(d2)));
  }
}

TEST_CASE("Wronskian of Ai and Ci") {
  double worst = 0.0;
  for (double x = -10.0; x <= 5.0; x += 0.01) {
    const cd ai = airy_eval(x, AiryFunction::Ai, 0), aip = airy_eval(x, AiryFunction::Ai, 1);
    const cd ci = airy_eval(x, AiryFunction::Ci, 0), cip = airy_eval(x, AiryFunction::Ci, 1);
    worst = std::max(worst, std::abs(aip * ci - ai * cip - 1.0 / pi));
    // Ci = iAi - Bi
    CHECK(std::abs(ci - (cd(0, 1) * ai - airy_eval(x, AiryFunction::Bi, 0))) < 1e-14 * std::max(1.0, std::abs(ci)));
  }
  CHECK(worst < 1e-10);
  // in the upper half plane Ci is recessive where Ai grows, so the Wronskian
  // only holds if Ci is computed without cancellation
  for (cd z : {cd(2.0, 3.0), cd(-7.0, 1.0), cd(12.0, 0.5), cd(-20.0, 2.0), cd(0.0, 15.0), cd(-40.0, 8.0)}) {
    const cd w = airy_eval(z, AiryFunction::Ai, 1) * airy_eval(z, AiryFunction::Ci, 0) -
                 airy_eval(z, AiryFunction::Ai, 0) * airy_eval(z, AiryFunction::Ci, 1);
    CHECK(std::abs(w - 1.0 / pi) < 1e-10);
  }
}

TEST_CASE("series and asymptotic branches agree beyond the switch point") {
  for (double r = 9.0; r <= 11.0; r += 0.1) {
    for (double arg : {0.0, 0.7, 2.0, pi}) {
      const cd z = std::polar(r, arg);
      for (auto f : {AiryFunction::Ai, AiryFunction::Bi}) {
        for (int order : {0, 1}) {
          const auto s = airy_scaled(z, f, order, AiryMethod::Series).value();
          const auto a = airy_scaled(z, f, order, AiryMethod::Asymptotic).value();
          CAPTURE(z);
          CHECK(std::abs(s - a) <= 1e-9 * std::max(1.0, std::abs(s)));
        }
      }
    }
  }
}

TEST_CASE("scaled representation keeps Bi finite far right") {
  const auto s = airy_scaled(cd(200.0, 0.0), AiryFunction::Bi, 0);
  CHECK(std::isfinite(s.mantissa.real()));
  const double log_bi = std::log(s.mantissa.real()) + s.log_scale;
  // Bi(x) ~ e^{ζ}/(√π x^{1/4})·(1 + u₁/ζ + u₂/ζ²), ζ = (2/3)x^{3/2}
  const double zeta = 2.0 / 3.0 * std::pow(200.0, 1.5);
  const double series = 1.0 + 5.0 / 72.0 / zeta + 385.0 / 10368.0 / (zeta * zeta);
  CHECK(log_bi == doctest::Approx(zeta - 0.5 * std::log(pi) - 0.25 * std::log(200.0) + std::log(series)).epsilon(1e-13));
  const auto a = airy_scaled(cd(200.0, 0.0), AiryFunction::Ai, 0);
  CHECK(std::log(a.mantissa.real()) + a.log_scale + log_bi == doctest::Approx(-std::log(2 * pi) - 0.5 * std::log(200.0)).epsilon(1e-8));
}

TEST_CASE("Airy kernel") {
  const double k00 = airy_kernel(0.0, 0.0);
  CHECK(k00 == doctest::Approx(std::pow(airy_ai(0.0).derivative, 2)).epsilon(1e-15));
  CHECK(k00 == doctest::Approx(0.06698747).epsilon(1e-7));
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-6.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng), y = u(rng);
    CHECK(airy_kernel(x, y) == airy_kernel(y, x));
    CHECK(std::abs(airy_kernel(x, y) - oracle::airy_kernel(x, y)) < 1e-13);
    // near-diagonal arguments route through the Taylor form without cancellation
    // ∂_y 𝒦(x, y) at y = x is -Ai(x)²/2
    const double d = std::pow(10.0, -4 - 8 * std::uniform_real_distribution<double>(0, 1)(rng));
    const double slope = -0.5 * std::pow(oracle::ai(x), 2);
    CHECK(std::abs(airy_kernel(x, x + d) - airy_kernel(x, x) - slope * d) < 1e-13 + d * d * (1 + x * x));
  }
}

TEST_CASE("Airy kernel integral identity") {
  for (auto [x, y] : {std::pair{0.0, 1.0}, {-1.0, 0.5}, {-3.0, -2.0}, {2.0, 2.5}, {-0.5, -0.5}}) {
    const double integral = oracle::integrate_to_infinity([&](double u) { return oracle::ai(x + u) * oracle::ai(y + u); }, 0.0);
    CHECK(std::abs(airy_kernel(x, y) - integral) < 1e-6);
  }
}

TEST_CASE("Airy kernel is positive semidefinite") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-5.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + trial % 3;
    Eigen::MatrixXd g(m, m);
    std::vector<double> t(m);
    for (auto& v : t) v = u(rng);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) g(i, j) = airy_kernel(t[i], t[j]);
    CHECK(g.determinant() >= -1e-10);
  }
}

TEST_CASE("edge density closed form against quadrature") {
  CHECK(edge_density(0.0) == doctest::Approx(std::pow(airy_ai(0.0).derivative, 2)).epsilon(1e-15));
  CHECK(edge_density(8.0) < 1e-10);
  CHECK(edge_density(8.0) > 0.0);
  for (double s : {-2.0, 0.0, 2.0, -5.0, 1.0}) {
    const double q = oracle::integrate_to_infinity([](double x) { return std::pow(oracle::ai(x), 2); }, s);
    CHECK(std::abs(edge_density(s) - q) < 1e-8);
  }
  for (double s = -6.0; s < 6.0; s += 0.1) CHECK(edge_density(s + 0.1) < edge_density(s));
}

TEST_CASE("model operator constants") {
  ModelOperator op;
  CHECK(op.kappa() == doctest::Approx(1.0));
  CHECK(op.gamma() == doctest::Approx(2.0));
  EdgeConstants e;
  e.c = 0.3;
  e.alpha = 1.7;
  e.side = EdgeSide::Left;
  const auto m = ModelOperator::from_edge(e);
  CHECK(m.ahalf == doctest::Approx(0.85));
  CHECK(m.slope == doctest::Approx(0.6));
  CHECK(m.side == EdgeSide::Left);
  CHECK(m.kappa() == doctest::Approx(std::cbrt(4 * e.c / e.alpha)).epsilon(1e-14));
  CHECK(m.gamma() * m.ahalf * m.kappa() * m.kappa() == doctest::Approx(1.0));
}

TEST_CASE("continuum resolvent solves the model equation") {
  for (EdgeSide side : {EdgeSide::Right, EdgeSide::Left}) {
    ModelOperator op{0.7, 0.4, side};
    const double sgn = side == EdgeSide::Right ? -1.0 : 1.0;
    for (cd zeta : {cd(0, 1), cd(0.5, -0.8), cd(-1.0, 2.0)}) {
      // off-diagonal ODE residual in x at (1, 2)
      auto r = [&](double x) { return continuum_resolvent(op, zeta, x, 2.0); };
      const cd res = op.ahalf * second_difference5(r, 1.0, 1e-2) + (sgn * op.slope * 1.0 - zeta) * r(1.0);
      CHECK(std::abs(res) < 1e-6);
      // jump of the x-derivative across the diagonal equals 1/ahalf
      const double y = 0.3, h = 1e-4;
      auto ry = [&](double x) { return continuum_resolvent(op, zeta, x, y); };
      const cd right = (-3.0 * ry(y) + 4.0 * ry(y + h) - ry(y + 2 * h)) / (2 * h);
      const cd left = (3.0 * ry(y) - 4.0 * ry(y - h) + ry(y - 2 * h)) / (2 * h);
      CHECK(std::abs(right - left - 1.0 / op.ahalf) < 1e-5);
      CHECK(std::abs(continuum_resolvent(op, zeta, 0.4, -1.1) - continuum_resolvent(op, zeta, -1.1, 0.4)) < 1e-15);
      CHECK(std::abs(continuum_resolvent(op, std::conj(zeta), 0.4, -1.1) - std::conj(continuum_resolvent(op, zeta, 0.4, -1.1))) < 1e-15);
    }
  }
  ModelOperator right{0.7, 0.4, EdgeSide::Right}, left{0.7, 0.4, EdgeSide::Left};
  CHECK(std::abs(continuum_resolvent(left, cd(0.2, 1), 0.5, -0.3) - continuum_resolvent(right, cd(0.2, 1), -0.5, 0.3)) < 1e-14);
  CHECK(testing::catch_error([&] { continuum_resolvent(right, 1.0, 0.0, 0.0); }));
}

TEST_CASE("continuum resolvent imaginary part is a positive kernel") {
  ModelOperator op{0.5, 0.5, EdgeSide::Right};
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-4.0, 4.0), v(0.05, 3.0);
  for (int i = 0; i < 200; ++i) {
    const cd zeta(u(rng), v(rng));
    const double x = u(rng), y = u(rng);
    const double ixy = continuum_resolvent(op, zeta, x, y).imag();
    const double ixx = continuum_resolvent(op, zeta, x, x).imag();
    const double iyy = continuum_resolvent(op, zeta, y, y).imag();
    CHECK(ixx > 0.0);
    CHECK(ixy * ixy <= ixx * iyy * (1 + 1e-12));
  }
}

TEST_CASE("continuum resolvent spectral representation") {
  ModelOperator op{0.5, 0.5, EdgeSide::Right};  // κ = 1, γ = 2
  const cd zeta(0.3, 1.0);
  const double x = 0.5, y = 0.2, kappa = op.kappa(), gamma = op.gamma();
  auto f = [&](double xi) {
    return oracle::ai(kappa * x + gamma * xi) * oracle::ai(kappa * y + gamma * xi) * (1.0 / (xi - zeta)).imag();
  };
  auto width = [&](double xi) { return 0.5 / (1.0 + std::sqrt(std::abs(gamma * xi)) / 2.0); };
  const double T = 300.0;
  double integral = oscillatory_integral(f, -T, 20.0, width);
  // beyond -T the product of the two oscillatory asymptotes averages to
  // cos(φ(X) - φ(Y))/(2π|XY|^{1/4}), φ = (2/3)|·|^{3/2}
  integral += oracle::integrate_to_infinity(
      [&](double u) {
        const double xi = -u;
        const double X = std::abs(kappa * x + gamma * xi), Y = std::abs(kappa * y + gamma * xi);
        const double dphi = 2.0 / 3.0 * (std::pow(X, 1.5) - std::pow(Y, 1.5));
        return std::cos(dphi) / (2 * pi * std::pow(X * Y, 0.25)) * (1.0 / (xi - zeta)).imag();
      },
      T);
  const double spectral = kappa * gamma * integral;  // = 2/(κa) with a = 2·ahalf
  CHECK(std::abs(continuum_resolvent(op, zeta, x, y).imag() - spectral) < 1e-5);
}

TEST_CASE("bracket sign pattern") {
  for (long k = -12; k <= 12; ++k) {
    CAPTURE(k);
    const long fl = static_cast<long>(std::floor((k + 1) / 2.0));
    CHECK(bracket_sign(k) == (fl % 2 == 0 ? 1 : -1));
    CHECK(bracket_sign(k + 4) == bracket_sign(k));
    CHECK(bracket_sign(k + 2) == -bracket_sign(k));  // period 4, antiperiodic under k → k + 2
  }
  CHECK(bracket_sign(0) == 1);
  CHECK(bracket_sign(1) == -1);
  CHECK(bracket_sign(2) == -1);
  CHECK(bracket_sign(3) == 1);
}

TEST_CASE("rescaled resolvent matrices") {
  ModelOperator op{0.5, 0.5, EdgeSide::Right};
  const cd zeta(0, 1);
  const int n = 125;  // n^{1/3} = 5
  std::vector<int> idx{118, 121, 125, 126, 130};
  LatticeGeometry one;
  const auto R = rescaled_resolvent_matrix(op, one, n, zeta, idx, idx);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t k = 0; k < idx.size(); ++k) {
      CHECK(std::abs(R(i, k) - R(k, i)) < 1e-14);
      const cd ref = 5.0 * continuum_resolvent(op, zeta, (n - idx[i]) / 5.0, (n - idx[k]) / 5.0);
      CHECK(std::abs(R(i, k) - ref) < 1e-12);
    }
  LatticeGeometry left{LatticeVariant::OneCutLeft};
  const auto L = rescaled_resolvent_matrix(op, left, n, zeta, idx, idx);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double s = ((idx[i] + idx[k]) % 2 == 0) ? 1.0 : -1.0;
      CHECK(std::abs(L(i, k) + s * R(i, k)) < 1e-14);
    }
  // two-cut outer layout: offsets ±a/(2b) n^{-1/3}, no sign decoration
  const double a = std::sqrt(2.0), b = std::sqrt(6.0);
  for (int shift : {0, 1}) {
    LatticeGeometry outer{LatticeVariant::TwoCutOuter, a, b, shift};
    const auto O = rescaled_resolvent_matrix(op, outer, n, zeta, idx, idx);
    auto coord = [&](int l) {
      const int j = n - l - shift;
      return j / 5.0 + (j % 2 == 0 ? 1.0 : -1.0) * a / (2 * 5.0 * b);
    };
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t k = 0; k < idx.size(); ++k)
        CHECK(std::abs(O(i, k) - 5.0 * continuum_resolvent(op, zeta, coord(idx[i]), coord(idx[k]))) < 1e-12);
  }
  // inner layout: bracket signs, offsets ±b/(2a) n^{-1/3}, left-oriented operator
  LatticeGeometry inner{LatticeVariant::TwoCutInner, a, b, 0};
  const auto I = rescaled_resolvent_matrix(op, inner, n, zeta, idx, idx);
  ModelOperator lop = op;
  lop.side = EdgeSide::Left;
  auto icoord = [&](int l) {
    const int j = n - l;
    return j / 5.0 + (j % 2 == 0 ? 1.0 : -1.0) * b / (2 * 5.0 * a);
  };
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double s = bracket_sign(n - idx[i]) * bracket_sign(n - idx[k]);
      CHECK(std::abs(I(i, k) - s * 5.0 * continuum_resolvent(lop, zeta, icoord(idx[i]), icoord(idx[k]))) < 1e-12);
    }
  CHECK(two_cut_index_shift(80) == 1);
  CHECK(two_cut_index_shift(81) == 0);
  CHECK(testing::catch_error([&] { rescaled_resolvent_matrix(op, one, n, 0.5, idx, idx); }));
  // the n^{1/3} scaling at fixed lattice offsets
  const auto R8 = rescaled_resolvent_matrix(op, one, 1000, zeta, {990}, {1000});
  CHECK(std::abs(R8(0, 0) - 10.0 * continuum_resolvent(op, zeta, 1.0, 0.0)) < 1e-12);
}
