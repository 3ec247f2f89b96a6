#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "edgelab/equilibrium.hpp"
#include "edgelab/orthopoly.hpp"

namespace edgelab {

/// Real symmetric kernel on the line. gram() may be overridden to share
/// per-node work (Airy values, wavefunctions) across a whole matrix.
class SymmetricKernel {
 public:
  virtual ~SymmetricKernel() = default;
  virtual double operator()(double t1, double t2) const = 0;
  virtual double diagonal(double t) const { return (*this)(t, t); }
  virtual Eigen::MatrixXd gram(const std::vector<double>& nodes) const;
};

class AiryKernel final : public SymmetricKernel {
 public:
  double operator()(double t1, double t2) const override;
  double diagonal(double t) const override;
  Eigen::MatrixXd gram(const std::vector<double>& nodes) const override;
};

/// (γn^{2/3})^{-1} K_n(a* ± t1/(γn^{2/3}), a* ± t2/(γn^{2/3})); the sign is
/// + at right edges and - at left edges, so t → +∞ always leaves the support.
class RescaledCdKernel final : public SymmetricKernel {
 public:
  RescaledCdKernel(const RecurrenceTable& table, const EdgeConstants& edge);
  double operator()(double t1, double t2) const override;
  Eigen::MatrixXd gram(const std::vector<double>& nodes) const override;
  double to_lambda(double t) const;

 private:
  const RecurrenceTable& table_;
  EdgeConstants edge_;
  double scale_;  // γ n^{2/3}
};

struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

/// First point t ≥ max(lo, 0) on a 0.25 lattice where the kernel diagonal
/// drops below 1e-16; intervals reaching +∞ are truncated there.
double tail_cutoff(const SymmetricKernel& kernel, double lo);

/// det(I - W^{1/2} K W^{1/2}) with m Gauss–Legendre nodes per interval.
double nystrom_det(const SymmetricKernel& kernel, const std::vector<Interval>& intervals, int m);

struct FredholmOptions {
  int quad_order = 40;
  double tol = 1e-10;
  int max_doublings = 2;
};

struct FredholmResult {
  double det = 1.0;
  int quad_order = 0;
  std::vector<double> truncation;  // cutoff per semi-infinite interval
  std::vector<std::pair<int, double>> history;  // (m, det_m)
};

/// Nyström determinant with node doubling until |det_m - det_2m| < tol.
/// Throws NoConvergence (both values in the message) after max_doublings.
FredholmResult fredholm_det(const SymmetricKernel& kernel, const std::vector<Interval>& intervals,
                            const FredholmOptions& options = {});

/// F₂(s) = det(1 - 𝒦) on (s, ∞).
FredholmResult tw_cdf(double s, double tol = 1e-10, int quad_order = 40);

/// E_n(Δ_n) for Δ_n = a* ± Δ/(γn^{2/3}); Δ must be bounded on the side facing
/// the support.
FredholmResult hole_probability_finite_n(const RecurrenceTable& table, const EdgeConstants& edge,
                                         const std::vector<Interval>& delta, const FredholmOptions& options = {});

}  // namespace edgelab
