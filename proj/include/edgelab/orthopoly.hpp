#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "edgelab/potential.hpp"

namespace edgelab {

/// Composite Gauss–Legendre grid on [-L, L] used to discretize the weight
/// e^{-nV}. Beyond L the orthonormal functions are below double underflow.
struct QuadratureGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  double L = 0.0;
  int n = 0;
};

/// Smallest multiple of 0.5 with L ≥ 2·support_radius and
/// n·(min V(±L)/2 - (2 + margin)·log L) > 60·ln 10.
double truncation_radius(const Potential& potential, int n, double support_radius, double margin = 1.0);

struct GridOptions {
  double L = 0.0;            // 0 → truncation_radius
  double node_factor = 1.0;  // scales the node count
  // Total length of the support; 0 → 2·support_radius. Supports shorter than
  // their radius (two cuts, shifted cuts) pack the oscillations of ψ_l into
  // less room, so the node count grows by 2·support_radius/support_length.
  double support_length = 0.0;
};

/// Grid adequate for the recurrence up to l = n1 (polynomial degree 2·n1 + 2).
QuadratureGrid build_grid(const Potential& potential, int n, int n1, double support_radius,
                          const GridOptions& options = {});

enum class PrecisionMode { Auto, Standard, Extended };

struct RecurrenceOptions {
  double epsilon = 2.0;  // growth margin: n1 = ceil(n(1 + ε/4))
  PrecisionMode precision = PrecisionMode::Auto;
  GridOptions grid;
};

/// ψ_{l-1}, ψ_l and their derivatives at one point, sharing a log scale:
/// true value = stored value · exp(log_scale).
struct WavePair {
  double prev = 0.0;
  double cur = 0.0;
  double dprev = 0.0;
  double dcur = 0.0;
  double log_scale = 0.0;
  bool underflow = false;
};

/// Recurrence coefficients of the orthonormal system ψ_l = p_l e^{-nV/2}:
///   λψ_l = J_l ψ_{l+1} + q_l ψ_l + J_{l-1} ψ_{l-1},
/// stored for l = 0..n1, plus the ψ_0 normalization.
class RecurrenceTable {
 public:
  RecurrenceTable(Potential potential, int n, std::vector<double> J, std::vector<double> q, double v_ref,
                  double log_norm, QuadratureGrid grid = {});

  int n() const noexcept { return n_; }
  int n1() const noexcept { return static_cast<int>(J_.size()) - 1; }
  const std::vector<double>& J() const noexcept { return J_; }
  const std::vector<double>& q() const noexcept { return q_; }
  const Potential& potential() const noexcept { return potential_; }
  const QuadratureGrid& grid() const noexcept { return grid_; }
  /// Largest final-pass overlap seen while building (orthogonality drift).
  double drift() const noexcept { return drift_; }
  bool extended_precision() const noexcept { return extended_; }
  /// Largest |q_l| measured before exact zeros were enforced (even V).
  double raw_q_max() const noexcept { return raw_q_max_; }

  /// ψ_l(λ); returns 0 (and sets *underflow) when e^{-nV/2} underflows.
  double psi(int l, double lambda, bool* underflow = nullptr) const;
  /// ψ_0..ψ_lmax at λ.
  std::vector<double> psi_all(double lambda, int lmax) const;
  /// ψ_{l-1}, ψ_l and derivatives at λ (l ≥ 1).
  WavePair pair(int l, double lambda) const;

  /// Christoffel–Darboux form of K_n(x, y) = Σ_{l<n} ψ_l(x)ψ_l(y).
  double cd_kernel(double x, double y) const;
  /// Direct sum form of the same kernel (reference path).
  double kernel_sum(double x, double y) const;
  /// ρ_n(λ) = K_n(λ, λ)/n.
  double finite_density(double lambda) const;
  /// det{K_n(λ_j, λ_k)}.
  double correlation_det(const std::vector<double>& points) const;

  /// Dense symmetric tridiagonal Jacobi matrix of dimension n1 + 1.
  Eigen::MatrixXd jacobi_matrix() const;

  void set_diagnostics(double drift, bool extended, double raw_q_max) {
    drift_ = drift;
    extended_ = extended;
    raw_q_max_ = raw_q_max;
  }

 private:
  Potential potential_;
  int n_;
  std::vector<double> J_;
  std::vector<double> q_;
  double v_ref_;
  double log_norm_;
  QuadratureGrid grid_;
  double drift_ = 0.0;
  bool extended_ = false;
  double raw_q_max_ = 0.0;
};

/// n1 = ceil(n(1 + ε/4)).
int extended_length(int n, double epsilon);

/// Discretized Stieltjes procedure (Lanczos with two-pass full
/// reorthogonalization) on the weighted grid. Throws Error(Precision) when the
/// orthogonality drift exceeds 1e-8 in the chosen mode; Auto retries with
/// extended-precision accumulation for n > 300.
RecurrenceTable recurrence_coefficients(const QuadratureGrid& grid, const Potential& potential, int n,
                                        const RecurrenceOptions& options = {});

/// Grid + recurrence in one call; the support radius comes from the
/// equilibrium measure.
RecurrenceTable build_recurrence(const Potential& potential, int n, const RecurrenceOptions& options = {});

/// Entries of (J - zI)^{-1} for the finite Jacobi matrix of the table,
/// rows × cols, via complex tridiagonal solves.
Eigen::MatrixXcd jacobi_resolvent_entries(const RecurrenceTable& table, std::complex<double> z,
                                          const std::vector<int>& rows, const std::vector<int>& cols);

}  // namespace edgelab
