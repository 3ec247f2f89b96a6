#pragma once

#include <complex>
#include <vector>

#include "edgelab/airy.hpp"
#include "edgelab/equilibrium.hpp"
#include "edgelab/fredholm.hpp"
#include "edgelab/orthopoly.hpp"
#include "edgelab/report.hpp"

namespace edgelab {

/// Recurrence asymptotics near l = n. The table entry J_{n+k-1} couples
/// ψ_{n+k-1} and ψ_{n+k}; it is compared against
///   one cut:  a/2 + (k/n)·c,
///   two cuts: (b - s_k a)/2 + (k/n)·(c_b + s_k c_a),  s_k = (-1)^{n+k},
/// with c_e = 1/((b²-a²)|P(e)|) the edge constant of endpoint e, for
/// |k| ≤ n^{2/3}. The alternating slope carries +c_a: the inner endpoint moves
/// inward as the effective coupling (n+k)/n grows.
struct RecurrenceAsymptotics {
  int n = 0;
  int kmax = 0;
  double c_empirical = 0.0;  // max n²|r_k|/(k²+1)
  double q_empirical = 0.0;  // max n²|q|/(k²+1)
  // two cuts: mean of J over s_k = +1 and s_k = -1, with their targets
  double mean_plus = 0.0, mean_minus = 0.0;
  double target_plus = 0.0, target_minus = 0.0;
};

RecurrenceAsymptotics recurrence_asymptotics(const RecurrenceTable& table, const EquilibriumMeasure& eq);

/// sup over t_grid² of |rescaled K_n - 𝒦| at one edge.
double edge_kernel_error(const RecurrenceTable& table, const EdgeConstants& edge, const std::vector<double>& t_grid);

/// |det{K̃(t_i,t_j)} - det{𝒦(t_i,t_j)}| for the given points.
double correlation_det_error(const RecurrenceTable& table, const EdgeConstants& edge, const std::vector<double>& t);

/// ν_n(s) = ρ_n(a* ± s/(γn^{2/3}))·n^{1/3}/γ.
double finite_edge_density(const RecurrenceTable& table, const EdgeConstants& edge, double s);
/// sup over s_grid of |ν_n - ν|.
double nu_error(const RecurrenceTable& table, const EdgeConstants& edge, const std::vector<double>& s_grid);

struct ResolventComparison {
  int n = 0;
  int M = 0;
  double d_norm = 0.0;        // spectral norm of the windowed D
  double r_diff = 0.0;        // max |R^(n) - R*|·n^{-1/3} over [n-M, n]²
  double identity_residual = 0.0;  // max |(J - z)R^(n) - I| on the window
};

/// ⌈n^{3/5}⌉.
int window_half_width(int n);

/// D^{(M)} = ((J - zI)R* - I) over |n - l| ≤ 2M at z = a* + n^{-2/3}ζ
/// (z = a* - n^{-2/3}ζ at a one-cut left edge).
ResolventComparison resolvent_comparison(const RecurrenceTable& table, const EquilibriumMeasure& eq,
                                         std::size_t endpoint_index, std::complex<double> zeta, int M = 0);

/// n·∫ ρ_n beyond a* ± L0/(γn^{2/3}) (outside the support).
double tail_mass(const RecurrenceTable& table, const EdgeConstants& edge, double L0);
/// Limit of the tail mass: ∫_{L0}^∞ ν(s) ds.
double airy_tail_mass(double L0);

/// Thresholds applied by the sweep reports.
struct DiagnosticThresholds {
  double recurrence_ratio_lo = 0.5;
  double recurrence_ratio_hi = 2.0;
  double parity_tolerance_factor = 5.0;  // |mean - target| ≤ factor/n
  double kernel_error = 0.02;
  double nu_error = 0.05;
  double resolvent_slope = -0.15;
  double resolvent_slack = 1.2;
  double tail_mass = 0.01;
  double tail_L0 = 4.0;
  double hole_error = 0.05;
  double split_tolerance = 1e-9;
};

struct SweepInput {
  const EquilibriumMeasure* eq = nullptr;
  std::vector<const RecurrenceTable*> tables;  // strictly increasing n
  DiagnosticThresholds thresholds;
  int quad_order = 40;
};

ConvergenceReport recurrence_report(const SweepInput& in);
ConvergenceReport edge_kernel_report(const SweepInput& in);
ConvergenceReport nu_report(const SweepInput& in);
ConvergenceReport resolvent_report(const SweepInput& in);
ConvergenceReport tail_report(const SweepInput& in);
ConvergenceReport hole_probability_report(const SweepInput& in);

}  // namespace edgelab
