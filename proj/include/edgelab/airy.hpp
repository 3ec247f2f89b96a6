#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "edgelab/equilibrium.hpp"

namespace edgelab {

enum class AiryFunction { Ai, Bi, Ci };
enum class AiryMethod { Auto, Series, Asymptotic };

/// |z| at which Auto switches from the Maclaurin series (quad precision) to
/// the asymptotic expansions.
inline constexpr double kAirySwitch = 9.5;

/// value = mantissa · exp(log_scale); keeps Bi/Ci finite far to the right.
struct ScaledComplex {
  std::complex<double> mantissa;
  double log_scale = 0.0;
  std::complex<double> value() const;
};

ScaledComplex airy_scaled(std::complex<double> z, AiryFunction which, int order,
                          AiryMethod method = AiryMethod::Auto);
/// Ai, Bi or Ci = iAi - Bi (order 0) or the derivative (order 1).
std::complex<double> airy_eval(std::complex<double> z, AiryFunction which, int order,
                               AiryMethod method = AiryMethod::Auto);

struct AiryPair {
  double value = 0.0;
  double derivative = 0.0;
};

/// Real Ai and Ai'.
AiryPair airy_ai(double x, AiryMethod method = AiryMethod::Auto);
/// Real Bi and Bi'.
AiryPair airy_bi(double x, AiryMethod method = AiryMethod::Auto);

/// (Ai(t1)Ai'(t2) - Ai'(t1)Ai(t2))/(t1 - t2), diagonal Ai'(t)² - tAi(t)².
double airy_kernel(double t1, double t2);
double airy_kernel(const AiryPair& p1, double t1, const AiryPair& p2, double t2);

/// ν(s) = Ai'(s)² - sAi(s)² = ∫_s^∞ Ai(x)² dx.
double edge_density(double s);

/// ahalf·d²/dx² ∓ slope·x (minus for right edges, plus for left edges).
struct ModelOperator {
  double ahalf = 0.5;
  double slope = 0.5;
  EdgeSide side = EdgeSide::Right;
  double kappa() const;  // (slope/ahalf)^{1/3}
  double gamma() const;  // 1/(ahalf·κ²)
  static ModelOperator from_edge(const EdgeConstants& edge);
};

/// Kernel of (A - ζ)^{-1}: π/(κ·ahalf)·Ci(X_<)Ai(X_>) with X = κx + γζ,
/// conjugated for Im ζ < 0 and reflected for left edges.
std::complex<double> continuum_resolvent(const ModelOperator& op, std::complex<double> zeta, double x, double y);

/// Lattice layouts of the continuum resolvent near an edge.
enum class LatticeVariant {
  OneCutRight,  // n^{1/3} R((n-l1)/n^{1/3}, (n-l2)/n^{1/3})
  OneCutLeft,   // -(-1)^{l1+l2} times the same
  TwoCutOuter,  // j = n - l, argument j/n^{1/3} + (-1)^j a/(2 n^{1/3} b)
  TwoCutInner,  // signs (-1)^{[(j+1)/2]}(-1)^{[(k+1)/2]}, offset (-1)^j b/(2 n^{1/3} a)
};

struct LatticeGeometry {
  LatticeVariant variant = LatticeVariant::OneCutRight;
  double a = 0.0;  // inner endpoint (two-cut only)
  double b = 0.0;  // outer endpoint (two-cut only)
  int index_shift = 0;  // lattice coordinate j = n - l - index_shift
};

/// Index shift that aligns the two-cut lattice parity with the recurrence
/// table: the printed alternation (-1)^j matches the table's site parity
/// (-1)^{l+1} only for odd n, so even n shifts j by one.
int two_cut_index_shift(int n);

/// Sign factor (-1)^{[(k+1)/2]}, [·] the floor.
int bracket_sign(long k);

/// R*_{l1,l2} for l1 in rows, l2 in cols.
Eigen::MatrixXcd rescaled_resolvent_matrix(const ModelOperator& op, const LatticeGeometry& geometry, int n,
                                           std::complex<double> zeta, const std::vector<int>& rows,
                                           const std::vector<int>& cols);

}  // namespace edgelab
