#include "edgelab/airy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edgelab/error.hpp"

namespace edgelab {

namespace {

using f128 = __float128;
using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Ai(0) and -Ai'(0) as unevaluated double sums, good to ~32 digits.
const f128 kC1 = static_cast<f128>(0.3550280538878172) + static_cast<f128>(2.05233632436212e-17);
const f128 kC2 = static_cast<f128>(0.2588194037928068) + static_cast<f128>(-2.522243111610832e-17);

f128 sqrt3_q() {
  f128 x = 1.7320508075688772;
  for (int i = 0; i < 3; ++i) x = (x + 3 / x) / 2;
  return x;
}
const f128 kSqrt3 = sqrt3_q();

struct qc {
  f128 re = 0;
  f128 im = 0;
};
inline qc operator+(qc a, qc b) { return {a.re + b.re, a.im + b.im}; }
inline qc operator-(qc a, qc b) { return {a.re - b.re, a.im - b.im}; }
inline qc operator*(qc a, qc b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline qc operator*(qc a, f128 s) { return {a.re * s, a.im * s}; }
inline double mag(qc a) { return std::abs(static_cast<double>(a.re)) + std::abs(static_cast<double>(a.im)); }
inline cd to_cd(qc a) { return {static_cast<double>(a.re), static_cast<double>(a.im)}; }

struct AiryAll {
  cd ai, aip, bi, bip;
};

// Maclaurin series: Ai = c1 f - c2 g, Bi = √3 (c1 f + c2 g).
AiryAll series(cd z) {
  const qc zq{z.real(), z.imag()};
  const qc z3 = zq * zq * zq;
  qc t{1, 0}, u = zq, s = zq * zq * f128(0.5), r{1, 0};
  qc f = t, g = u, fp = s, gp = r;
  double peak = std::max({mag(t), mag(u), mag(s), mag(r)});
  for (int k = 1; k < 500; ++k) {
    const f128 kk = k;
    t = t * z3 * (1 / ((3 * kk - 1) * (3 * kk)));
    u = u * z3 * (1 / ((3 * kk) * (3 * kk + 1)));
    r = r * z3 * (1 / ((3 * kk) * (3 * kk - 2)));
    f = f + t;
    g = g + u;
    gp = gp + r;
    if (k >= 2) {
      s = s * z3 * (1 / ((3 * kk - 1) * (3 * kk - 3)));
      fp = fp + s;
    }
    const double m = std::max({mag(t), mag(u), mag(s), mag(r)});
    peak = std::max(peak, m);
    if (k > 3 && m < 1e-40 * std::max(peak, 1.0)) break;
  }
  AiryAll out;
  out.ai = to_cd(f * kC1 - g * kC2);
  out.aip = to_cd(fp * kC1 - gp * kC2);
  out.bi = to_cd((f * kC1 + g * kC2) * kSqrt3);
  out.bip = to_cd((fp * kC1 + gp * kC2) * kSqrt3);
  return out;
}

// u_k, v_k of the Airy asymptotic expansions.
struct AsymptoticCoefficients {
  std::vector<double> u, v;
  AsymptoticCoefficients() {
    const int K = 80;
    u.resize(K + 1);
    v.resize(K + 1);
    u[0] = v[0] = 1.0;
    for (int k = 1; k <= K; ++k) {
      u[k] = u[k - 1] * (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
      v[k] = -(6.0 * k + 1) / (6.0 * k - 1) * u[k];
    }
  }
};
const AsymptoticCoefficients& coeffs() {
  static const AsymptoticCoefficients c;
  return c;
}

// Σ_k (sign)^k c_{start+2k... } style sums, truncated at the smallest term.
// full: Σ (-1)^k c_k ζ^{-k}; even/odd: Σ (-1)^k c_{2k(+1)} ζ^{-2k(-1)}.
cd sum_full(const std::vector<double>& c, cd zeta) {
  const cd inv = 1.0 / zeta;
  cd term = 1.0, acc = 0.0;
  double prev = INFINITY;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const cd t = (k % 2 ? -1.0 : 1.0) * c[k] * term;
    const double m = std::abs(t);
    if (k > 0 && m > prev) break;
    acc += t;
    if (m < 1e-17 * std::abs(acc)) break;
    prev = m;
    term *= inv;
  }
  return acc;
}

void sum_split(const std::vector<double>& c, cd zeta, cd& even, cd& odd) {
  const cd inv = 1.0 / zeta;
  const cd inv2 = inv * inv;
  cd pe = 1.0, po = inv;
  even = 0.0;
  odd = 0.0;
  double prev = INFINITY;
  for (std::size_t k = 0; 2 * k + 1 < c.size(); ++k) {
    const double sg = k % 2 ? -1.0 : 1.0;
    const cd te = sg * c[2 * k] * pe;
    const cd to = sg * c[2 * k + 1] * po;
    const double m = std::max(std::abs(te), std::abs(to));
    if (k > 0 && m > prev) break;
    even += te;
    odd += to;
    if (m < 1e-17 * (std::abs(even) + std::abs(odd))) break;
    prev = m;
    pe *= inv2;
    po *= inv2;
  }
}

struct ScaledPair {
  ScaledComplex value, derivative;
};

// Ai and Ai' from the asymptotic expansions (scaled).
ScaledPair ai_asymptotic(cd z) {
  const auto& C = coeffs();
  const double sqrt_pi = std::sqrt(kPi);
  ScaledPair out;
  if (std::abs(std::arg(z)) <= 2.0 * kPi / 3.0) {
    const cd zeta = (2.0 / 3.0) * z * std::sqrt(z);
    const cd z14 = std::sqrt(std::sqrt(z));
    const cd phase = std::exp(cd(0.0, -zeta.imag()));
    out.value.mantissa = phase * sum_full(C.u, zeta) / (2.0 * sqrt_pi * z14);
    out.value.log_scale = -zeta.real();
    out.derivative.mantissa = -phase * z14 * sum_full(C.v, zeta) / (2.0 * sqrt_pi);
    out.derivative.log_scale = -zeta.real();
    return out;
  }
  const cd w = -z;
  const cd zeta = (2.0 / 3.0) * w * std::sqrt(w);
  const cd w14 = std::sqrt(std::sqrt(w));
  const cd theta = zeta - kPi / 4.0;
  const double m = std::abs(theta.imag());
  const cd ep = std::exp(cd(0.0, 1.0) * theta - m);
  const cd em = std::exp(-cd(0.0, 1.0) * theta - m);
  const cd cs = 0.5 * (ep + em);
  const cd sn = (ep - em) / cd(0.0, 2.0);
  cd ue, uo, ve, vo;
  sum_split(C.u, zeta, ue, uo);
  sum_split(C.v, zeta, ve, vo);
  out.value.mantissa = (cs * ue + sn * uo) / (sqrt_pi * w14);
  out.value.log_scale = m;
  out.derivative.mantissa = w14 * (sn * ve - cs * vo) / sqrt_pi;
  out.derivative.log_scale = m;
  return out;
}

ScaledComplex combine(cd c1, const ScaledComplex& a, cd c2, const ScaledComplex& b) {
  ScaledComplex out;
  out.log_scale = std::max(a.log_scale, b.log_scale);
  out.mantissa = c1 * a.mantissa * std::exp(a.log_scale - out.log_scale) +
                 c2 * b.mantissa * std::exp(b.log_scale - out.log_scale);
  return out;
}

ScaledPair bi_asymptotic(cd z) {
  const cd omega = std::polar(1.0, 2.0 * kPi / 3.0);
  const cd e6 = std::polar(1.0, kPi / 6.0);
  const auto p = ai_asymptotic(omega * z);
  const auto m = ai_asymptotic(std::conj(omega) * z);
  ScaledPair out;
  out.value = combine(e6, p.value, std::conj(e6), m.value);
  out.derivative = combine(e6 * omega, p.derivative, std::conj(e6 * omega), m.derivative);
  return out;
}

bool use_series(cd z, AiryMethod method) {
  if (method == AiryMethod::Series) return true;
  if (method == AiryMethod::Asymptotic) return false;
  return std::abs(z) <= kAirySwitch;
}

}  // namespace

std::complex<double> ScaledComplex::value() const { return mantissa * std::exp(log_scale); }

ScaledComplex airy_scaled(std::complex<double> z, AiryFunction which, int order, AiryMethod method) {
  if (order != 0 && order != 1) throw Error(ErrorKind::InvalidInput, "airy: order must be 0 or 1");
  if (!(std::abs(z) <= 1e4)) throw Error(ErrorKind::InvalidInput, "airy: |z| must not exceed 1e4");
  if (which == AiryFunction::Ci) {
    // Ci = iAi - Bi = -2e^{-iπ/6} Ai(ze^{-2πi/3}). The rotated form has no
    // cancellation where Ci is recessive (the upper half plane away from the
    // positive axis), where iAi and Bi are exponentially larger than Ci.
    const cd rot = std::polar(1.0, -2.0 * kPi / 3.0);
    const cd pre = -2.0 * std::polar(1.0, -kPi / 6.0) * (order ? rot : cd(1.0));
    ScaledComplex a = airy_scaled(rot * z, AiryFunction::Ai, order, method);
    a.mantissa *= pre;
    return a;
  }
  if (use_series(z, method)) {
    const auto s = series(z);
    if (which == AiryFunction::Ai) return {order ? s.aip : s.ai, 0.0};
    return {order ? s.bip : s.bi, 0.0};
  }
  if (which == AiryFunction::Ai) {
    const auto a = ai_asymptotic(z);
    return order ? a.derivative : a.value;
  }
  const auto b = bi_asymptotic(z);
  return order ? b.derivative : b.value;
}

std::complex<double> airy_eval(std::complex<double> z, AiryFunction which, int order, AiryMethod method) {
  auto v = airy_scaled(z, which, order, method).value();
  if (z.imag() == 0.0 && which != AiryFunction::Ci) v = cd(v.real(), 0.0);
  return v;
}

AiryPair airy_ai(double x, AiryMethod method) {
  if (use_series(x, method)) {
    // real quad-precision series
    const f128 xq = x;
    const f128 x3 = xq * xq * xq;
    f128 t = 1, u = xq, s = xq * xq / 2, r = 1;
    f128 f = t, g = u, fp = s, gp = r;
    double peak = 1.0;
    for (int k = 1; k < 500; ++k) {
      const f128 kk = k;
      t *= x3 / ((3 * kk - 1) * (3 * kk));
      u *= x3 / ((3 * kk) * (3 * kk + 1));
      r *= x3 / ((3 * kk) * (3 * kk - 2));
      f += t;
      g += u;
      gp += r;
      if (k >= 2) {
        s *= x3 / ((3 * kk - 1) * (3 * kk - 3));
        fp += s;
      }
      const double m = std::max({std::abs(double(t)), std::abs(double(u)), std::abs(double(s)), std::abs(double(r))});
      peak = std::max(peak, m);
      if (k > 3 && m < 1e-40 * peak) break;
    }
    return {static_cast<double>(kC1 * f - kC2 * g), static_cast<double>(kC1 * fp - kC2 * gp)};
  }
  const auto a = ai_asymptotic(cd(x, 0.0));
  return {a.value.value().real(), a.derivative.value().real()};
}

AiryPair airy_bi(double x, AiryMethod method) {
  return {airy_eval(x, AiryFunction::Bi, 0, method).real(), airy_eval(x, AiryFunction::Bi, 1, method).real()};
}

double airy_kernel(const AiryPair& p1, double t1, const AiryPair& p2, double t2) {
  if (std::abs(t1 - t2) >= 1e-4) {
    return (p1.value * p2.derivative - p1.derivative * p2.value) / (t1 - t2);
  }
  // even Taylor expansion about the midpoint t: K = ν(t) + h²·c2(t) + O(h⁴)
  const double t = 0.5 * (t1 + t2);
  const double h = 0.5 * (t1 - t2);
  const auto p = airy_ai(t);
  const double ai = p.value, aip = p.derivative;
  const double nu = aip * aip - t * ai * ai;
  const double c2 = (-2.0 * t * t * ai * ai + 2.0 * t * aip * aip + ai * aip) / 3.0;
  return nu + h * h * c2;
}

double airy_kernel(double t1, double t2) {
  if (std::abs(t1 - t2) < 1e-4) return airy_kernel({}, t1, {}, t2);
  return airy_kernel(airy_ai(t1), t1, airy_ai(t2), t2);
}

double edge_density(double s) {
  const auto p = airy_ai(s);
  return p.derivative * p.derivative - s * p.value * p.value;
}

double ModelOperator::kappa() const { return std::cbrt(slope / ahalf); }
double ModelOperator::gamma() const {
  const double k = kappa();
  return 1.0 / (ahalf * k * k);
}

ModelOperator ModelOperator::from_edge(const EdgeConstants& edge) {
  return ModelOperator{edge.ahalf(), edge.slope(), edge.side};
}

namespace {

struct ResolventFactor {
  ScaledComplex ai, ci;
};

ResolventFactor factor_at(const ModelOperator& op, cd zeta_upper, double x) {
  const double xr = op.side == EdgeSide::Left ? -x : x;
  const cd X = op.kappa() * xr + op.gamma() * zeta_upper;
  return {airy_scaled(X, AiryFunction::Ai, 0), airy_scaled(X, AiryFunction::Ci, 0)};
}

// π/(κ·ahalf) Ci(X_<) Ai(X_>) for the upper half plane.
cd resolvent_from_factors(const ModelOperator& op, double x, const ResolventFactor& fx, double y,
                          const ResolventFactor& fy) {
  const double xr = op.side == EdgeSide::Left ? -x : x;
  const double yr = op.side == EdgeSide::Left ? -y : y;
  const ResolventFactor& lo = xr <= yr ? fx : fy;
  const ResolventFactor& hi = xr <= yr ? fy : fx;
  const cd prod = lo.ci.mantissa * hi.ai.mantissa * std::exp(lo.ci.log_scale + hi.ai.log_scale);
  return kPi / (op.kappa() * op.ahalf) * prod;
}

}  // namespace

std::complex<double> continuum_resolvent(const ModelOperator& op, std::complex<double> zeta, double x, double y) {
  if (zeta.imag() == 0.0) throw Error(ErrorKind::InvalidInput, "continuum_resolvent: Im ζ must be nonzero");
  const bool lower = zeta.imag() < 0.0;
  const cd zu = lower ? std::conj(zeta) : zeta;
  const auto fx = factor_at(op, zu, x);
  const auto fy = x == y ? fx : factor_at(op, zu, y);
  const cd r = resolvent_from_factors(op, x, fx, y, fy);
  return lower ? std::conj(r) : r;
}

int two_cut_index_shift(int n) { return n % 2 == 0 ? 1 : 0; }

int bracket_sign(long k) {
  // floor((k+1)/2) for any sign of k
  long q = (k + 1) / 2;
  if ((k + 1) % 2 != 0 && (k + 1) < 0) --q;
  return (q % 2 == 0) ? 1 : -1;
}

Eigen::MatrixXcd rescaled_resolvent_matrix(const ModelOperator& op_in, const LatticeGeometry& geom, int n,
                                           std::complex<double> zeta, const std::vector<int>& rows,
                                           const std::vector<int>& cols) {
  if (zeta.imag() == 0.0) throw Error(ErrorKind::InvalidInput, "rescaled_resolvent_matrix: Im ζ must be nonzero");
  ModelOperator op = op_in;
  // The orientation is part of the layout: inner two-cut edges use the
  // left-oriented operator, every other layout the right-oriented one.
  op.side = geom.variant == LatticeVariant::TwoCutInner ? EdgeSide::Left : EdgeSide::Right;
  const double n13 = std::cbrt(static_cast<double>(n));
  auto coordinate = [&](int l) {
    const long j = static_cast<long>(n) - l - geom.index_shift;
    const double par = (j % 2 == 0) ? 1.0 : -1.0;
    switch (geom.variant) {
      case LatticeVariant::OneCutRight:
      case LatticeVariant::OneCutLeft: return j / n13;
      case LatticeVariant::TwoCutOuter: return j / n13 + par * geom.a / (2.0 * n13 * geom.b);
      case LatticeVariant::TwoCutInner: return j / n13 + par * geom.b / (2.0 * n13 * geom.a);
    }
    return 0.0;
  };
  auto sign = [&](int l) {
    const long j = static_cast<long>(n) - l - geom.index_shift;
    switch (geom.variant) {
      case LatticeVariant::OneCutLeft: return (l % 2 == 0) ? 1.0 : -1.0;
      case LatticeVariant::TwoCutInner: return static_cast<double>(bracket_sign(j));
      default: return 1.0;
    }
  };
  const bool lower = zeta.imag() < 0.0;
  const cd zu = lower ? std::conj(zeta) : zeta;
  std::vector<ResolventFactor> fr, fc;
  std::vector<double> xr, xc;
  for (int l : rows) {
    xr.push_back(coordinate(l));
    fr.push_back(factor_at(op, zu, xr.back()));
  }
  for (int l : cols) {
    xc.push_back(coordinate(l));
    fc.push_back(factor_at(op, zu, xc.back()));
  }
  const double global = geom.variant == LatticeVariant::OneCutLeft ? -1.0 : 1.0;
  Eigen::MatrixXcd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
      cd r = resolvent_from_factors(op, xr[i], fr[i], xc[k], fc[k]);
      if (lower) r = std::conj(r);
      out(i, k) = global * sign(rows[i]) * sign(cols[k]) * n13 * r;
    }
  }
  return out;
}

}  // namespace edgelab
