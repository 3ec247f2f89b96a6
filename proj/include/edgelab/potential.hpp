#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace edgelab {

/// Real polynomial potential V(λ) = Σ c_k λ^k with even degree and positive
/// leading coefficient, so the weight e^{-nV} is confining for every n.
///
/// A potential may carry a centering shift: the stored coefficients are then
/// those of λ ↦ V(λ + shift), and every evaluator works in the centered
/// variable. Polynomials are Lipschitz on compacts and real analytic, so no
/// further regularity checks are needed.
class Potential {
 public:
  /// Throws Error(InvalidInput) naming the violated invariant.
  explicit Potential(std::vector<double> coeffs, double shift = 0.0);

  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  double shift() const noexcept { return shift_; }
  bool is_even() const noexcept;

  /// Horner evaluation of V (order 0) or V' (order 1) at complex z.
  std::complex<double> evaluate(std::complex<double> z, int order) const;
  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  /// (V'(z) - V'(λ)) / (z - λ) from the coefficient expansion
  /// Σ_m v_m (z^{m-1} + z^{m-2}λ + ... + λ^{m-1}); exact at z = λ.
  std::complex<double> divided_difference(std::complex<double> z, double lambda) const;

  /// Coefficients v_m of V'(λ) = Σ v_m λ^m.
  std::vector<double> derivative_coefficients() const;

  /// Potential λ ↦ V(λ + delta) in the current variable; shifts accumulate.
  Potential centered(double delta) const;
  /// Potential factor·V (same shift).
  Potential scaled(double factor) const;

  /// Global minimum over the real line (location, value).
  std::pair<double, double> minimum() const;

  /// "poly:c0,c1,...,cd" with the shortest round-trip decimal form.
  std::string to_spec() const;

 private:
  std::vector<double> coeffs_;
  double shift_ = 0.0;
};

/// Parses the potential DSL "poly:c0,c1,...,cd" (ASCII decimals, no spaces).
Potential parse_potential(std::string_view spec);

}  // namespace edgelab
