#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "edgelab/potential.hpp"

namespace edgelab {

enum class SupportKind { OneCut, TwoCut };
enum class KindHint { OneCut, TwoCut, Auto };

std::string to_string(SupportKind kind);

/// Support of the equilibrium measure in the centered variable μ = λ - shift:
/// [-a, a] for OneCut, [-b, -a] ∪ [a, b] for TwoCut (even potentials only).
struct SupportGeometry {
  SupportKind kind = SupportKind::OneCut;
  double a = 0.0;
  double b = 0.0;  // TwoCut only
  double shift = 0.0;
};

enum class EdgeSide { Left, Right };

std::string to_string(EdgeSide side);

/// Edge scaling data for one endpoint. The local model operator is
/// ahalf·d²/dx² - slope·x (right edges; reflected for left ones), with
/// ahalf = α/2 and slope = 2c.
struct EdgeConstants {
  double endpoint = 0.0;  // in the original variable
  EdgeSide side = EdgeSide::Right;
  double c = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;  // (2c²α)^{-1/3}
  double kappa = 0.0;  // (4c/α)^{1/3}
  double ahalf() const noexcept { return 0.5 * alpha; }
  double slope() const noexcept { return 2.0 * c; }
};

/// Equilibrium measure of a polynomial potential. Evaluators take the original
/// variable λ; the master polynomial coefficients live in the centered one.
class EquilibriumMeasure {
 public:
  EquilibriumMeasure(const Potential& potential, SupportGeometry support);

  const SupportGeometry& support() const noexcept { return support_; }
  /// The potential as given (uncentered).
  const Potential& potential() const noexcept { return potential_; }
  /// Coefficients of P in μ = λ - shift, ascending degree.
  const std::vector<double>& p_coeffs() const noexcept { return p_; }

  /// Endpoints in the original variable, ascending.
  std::vector<double> endpoints() const;
  /// Outermost support edges.
  double right_endpoint() const;
  double left_endpoint() const;

  double master_p(double lambda) const;
  std::complex<double> master_p(std::complex<double> z) const;

  double density(double lambda) const;
  /// Lim ρ(λ)/√|λ - e| approaching endpoint e from inside the support.
  double edge_amplitude(double endpoint) const;

  /// Cauchy transform; throws for real z inside the support.
  std::complex<double> stieltjes(std::complex<double> z) const;
  /// 𝒬(z) = Σ moments against the divided difference of V'.
  std::complex<double> q_function(std::complex<double> z) const;
  /// Moments ∫ λ^k ρ(λ) dλ in the original variable, k = 0..kmax.
  std::vector<double> moments(int kmax) const;

  /// u(λ) = 2∫ log|μ-λ| ρ(μ) dμ - V(λ).
  double effective_potential(double lambda) const;
  /// ∫∫ log|λ-μ|^{-1} ρ ρ + ∫ V ρ.
  double energy() const;

  EdgeConstants edge_constants(std::size_t endpoint_index) const;
  EdgeConstants right_edge() const { return edge_constants(endpoints().size() - 1); }
  EdgeConstants left_edge() const { return edge_constants(0); }

  /// (1/2a)(1/P(a) + 1/P(-a)) for OneCut: the slope of J_{n+k} in k/n.
  double recurrence_slope() const;

  /// Support intervals in the original variable.
  std::vector<std::pair<double, double>> intervals() const;

 private:
  std::complex<double> x_exterior(std::complex<double> mu) const;
  double x_plus(double mu) const;

  Potential potential_;
  Potential centered_;
  SupportGeometry support_;
  std::vector<double> p_;
};

/// Master polynomial P for a given support (centered coefficients).
std::vector<double> master_polynomial(const Potential& potential, const SupportGeometry& support);

/// Finds the support endpoints by matching V' - P·X = 2/z + O(z^-2) at
/// infinity; candidates are validated (ρ ≥ 0, P(a*) > 0 and the variational
/// inequality off the support). Auto tries OneCut, then TwoCut for even V.
SupportGeometry solve_support(const Potential& potential, KindHint hint = KindHint::Auto);
EquilibriumMeasure solve_equilibrium(const Potential& potential, KindHint hint = KindHint::Auto);

/// Support of the minimizer of the δ-deformed functional, i.e. of V/(1-δ).
SupportGeometry deformed_support(const Potential& potential, double delta);

/// Logarithmic energy of an arbitrary density on a union of intervals:
/// ∫∫ log|λ-μ|^{-1} ρ(λ)ρ(μ) + ∫ Vρ. The density may vanish like a square
/// root or stay bounded at the interval ends.
double log_energy(const std::function<double(double)>& rho,
                  const std::vector<std::pair<double, double>>& intervals, const Potential& potential);

/// ∫ log|λ-μ| ρ(μ) dμ with the singularity at λ split off.
double log_potential(const std::function<double(double)>& rho,
                     const std::vector<std::pair<double, double>>& intervals, double lambda);

}  // namespace edgelab
