#include "edgelab/orthopoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "edgelab/equilibrium.hpp"
#include "edgelab/error.hpp"
#include "edgelab/quadrature.hpp"

namespace edgelab {

namespace {

constexpr double kRescaleHigh = 1e150;
constexpr double kDriftLimit = 1e-8;
// exp(x) underflows to zero below this
constexpr double kLogUnderflow = -745.0;

struct LanczosResult {
  std::vector<double> J;
  std::vector<double> q;
  double drift = 0.0;
};

LanczosResult lanczos(const std::vector<double>& x, const std::vector<double>& s, int steps, bool extended) {
  const std::size_t N = x.size();
  const int K = steps + 1;  // vectors q_0..q_steps
  Eigen::MatrixXd Q(N, K + 1);
  Eigen::VectorXd r(N);
  LanczosResult out;
  out.J.resize(steps);
  out.q.resize(steps);
  {
    const double nrm = std::sqrt(extended ? dot2(s.data(), s.data(), N) : dot_compensated(s.data(), s.data(), N));
    for (std::size_t i = 0; i < N; ++i) Q(i, 0) = s[i] / nrm;
  }
  Eigen::VectorXd c;
  for (int l = 0; l < steps; ++l) {
    const double* ql = Q.col(l).data();
    for (std::size_t i = 0; i < N; ++i) r[i] = x[i] * ql[i];
    const double alpha = extended ? dot2(ql, r.data(), N) : dot_compensated(ql, r.data(), N);
    r -= alpha * Q.col(l);
    if (l > 0) r -= out.J[l - 1] * Q.col(l - 1);
    double last_overlap = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      const auto basis = Q.leftCols(l + 1);
      if (extended) {
        c.resize(l + 1);
        for (int j = 0; j <= l; ++j) c[j] = dot2(Q.col(j).data(), r.data(), N);
      } else {
        c.noalias() = basis.transpose() * r;
      }
      r.noalias() -= basis * c;
      if (pass == 1) last_overlap = c.cwiseAbs().maxCoeff();
    }
    const double beta = std::sqrt(extended ? dot2(r.data(), r.data(), N) : dot_compensated(r.data(), r.data(), N));
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw Error(ErrorKind::Numerical, "lanczos: breakdown (grid too coarse for the requested length)");
    }
    out.drift = std::max(out.drift, last_overlap / beta);
    out.q[l] = alpha;
    out.J[l] = beta;
    Q.col(l + 1) = r / beta;
  }
  return out;
}

}  // namespace

int extended_length(int n, double epsilon) {
  return static_cast<int>(std::ceil(n * (1.0 + epsilon / 4.0) - 1e-9));
}

double truncation_radius(const Potential& potential, int n, double support_radius, double margin) {
  const double target = 60.0 * std::log(10.0);
  double L = std::max(0.5, std::ceil(2.0 * support_radius / 0.5) * 0.5);
  for (int it = 0; it < 100000; ++it, L += 0.5) {
    const double v = std::min(potential.value(L), potential.value(-L));
    if (n * (v / 2.0 - (2.0 + margin) * std::log(L)) > target) return L;
  }
  throw Error(ErrorKind::Numerical, "truncation_radius: no admissible radius found");
}

QuadratureGrid build_grid(const Potential& potential, int n, int n1, double support_radius,
                          const GridOptions& options) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "build_grid: n must be positive");
  QuadratureGrid g;
  g.n = n;
  g.L = options.L > 0.0 ? options.L : truncation_radius(potential, n, support_radius);
  const int per_panel = 32;
  // keep the node density over the support fixed when L grows
  const double stretch = std::max(1.0, g.L / (2.0 * std::max(support_radius, 1e-3)));
  const double span = 2.0 * std::max(support_radius, 1e-3);
  const double packing = options.support_length > 0.0 ? std::max(1.0, span / options.support_length) : 1.0;
  const double total = options.node_factor * (3.0 * (2.0 * n1 + 2.0) * stretch * packing + 64.0);
  const int panels = std::max(4, static_cast<int>(std::ceil(total / per_panel)));
  const auto rule = composite_gauss_legendre(per_panel, panels, -g.L, g.L);
  g.nodes = rule.nodes;
  g.weights = rule.weights;
  return g;
}

RecurrenceTable::RecurrenceTable(Potential potential, int n, std::vector<double> J, std::vector<double> q,
                                 double v_ref, double log_norm, QuadratureGrid grid)
    : potential_(std::move(potential)),
      n_(n),
      J_(std::move(J)),
      q_(std::move(q)),
      v_ref_(v_ref),
      log_norm_(log_norm),
      grid_(std::move(grid)) {
  if (J_.size() != q_.size() || J_.empty()) {
    throw Error(ErrorKind::InvalidInput, "RecurrenceTable: J and q must be nonempty and of equal length");
  }
  for (double j : J_) {
    if (!(j > 0.0)) throw Error(ErrorKind::Numerical, "RecurrenceTable: nonpositive off-diagonal coefficient");
  }
}

WavePair RecurrenceTable::pair(int l, double lambda) const {
  if (l < 1 || l > n1()) throw Error(ErrorKind::InvalidInput, "pair: index out of range");
  WavePair w;
  w.log_scale = -0.5 * n_ * (potential_.value(lambda) - v_ref_) - 0.5 * log_norm_;
  double p_prev = 0.0, p_cur = 1.0;
  double d_prev = 0.0, d_cur = -0.5 * n_ * potential_.derivative(lambda);
  for (int k = 0; k < l; ++k) {
    const double jm1 = k > 0 ? J_[k - 1] : 0.0;
    const double next = ((lambda - q_[k]) * p_cur - jm1 * p_prev) / J_[k];
    const double dnext = ((lambda - q_[k]) * d_cur + p_cur - jm1 * d_prev) / J_[k];
    p_prev = p_cur;
    p_cur = next;
    d_prev = d_cur;
    d_cur = dnext;
    const double mag = std::max({std::abs(p_cur), std::abs(d_cur), std::abs(p_prev), std::abs(d_prev)});
    if (mag > kRescaleHigh) {
      const double f = 1.0 / mag;
      p_prev *= f, p_cur *= f, d_prev *= f, d_cur *= f;
      w.log_scale += std::log(mag);
    }
  }
  w.prev = p_prev;
  w.cur = p_cur;
  w.dprev = d_prev;
  w.dcur = d_cur;
  w.underflow = w.log_scale < kLogUnderflow;
  return w;
}

double RecurrenceTable::psi(int l, double lambda, bool* underflow) const {
  if (l < 0 || l > n1()) throw Error(ErrorKind::InvalidInput, "psi: index out of range");
  double value;
  double scale;
  if (l == 0) {
    scale = -0.5 * n_ * (potential_.value(lambda) - v_ref_) - 0.5 * log_norm_;
    value = 1.0;
  } else {
    const auto w = pair(l, lambda);
    scale = w.log_scale;
    value = w.cur;
  }
  const double out = value * std::exp(scale);
  const bool uf = (out == 0.0 && value != 0.0) || scale < kLogUnderflow;
  if (underflow) *underflow = uf;
  return uf ? 0.0 : out;
}

std::vector<double> RecurrenceTable::psi_all(double lambda, int lmax) const {
  if (lmax < 0 || lmax > n1()) throw Error(ErrorKind::InvalidInput, "psi_all: index out of range");
  std::vector<double> out(lmax + 1);
  double scale = -0.5 * n_ * (potential_.value(lambda) - v_ref_) - 0.5 * log_norm_;
  double p_prev = 0.0, p_cur = 1.0;
  out[0] = std::exp(scale);
  for (int k = 0; k < lmax; ++k) {
    const double jm1 = k > 0 ? J_[k - 1] : 0.0;
    const double next = ((lambda - q_[k]) * p_cur - jm1 * p_prev) / J_[k];
    p_prev = p_cur;
    p_cur = next;
    const double mag = std::max(std::abs(p_cur), std::abs(p_prev));
    if (mag > kRescaleHigh) {
      p_prev /= mag;
      p_cur /= mag;
      scale += std::log(mag);
    }
    out[k + 1] = p_cur * std::exp(scale);
  }
  return out;
}

double RecurrenceTable::cd_kernel(double x, double y) const {
  const double jn = J_.at(n_ - 1);
  if (std::abs(x - y) < 1e-6 / n_) {
    const auto w = pair(n_, 0.5 * (x + y));
    if (w.underflow) return 0.0;
    return jn * (w.dcur * w.prev - w.dprev * w.cur) * std::exp(2.0 * w.log_scale);
  }
  const auto wx = pair(n_, x);
  const auto wy = pair(n_, y);
  const double scale = wx.log_scale + wy.log_scale;
  if (scale < kLogUnderflow) return 0.0;
  return jn * (wx.cur * wy.prev - wx.prev * wy.cur) / (x - y) * std::exp(scale);
}

double RecurrenceTable::kernel_sum(double x, double y) const {
  const auto px = psi_all(x, n_ - 1);
  const auto py = psi_all(y, n_ - 1);
  CompensatedSum acc;
  for (int l = 0; l < n_; ++l) acc.add(px[l] * py[l]);
  return acc.value();
}

double RecurrenceTable::finite_density(double lambda) const { return cd_kernel(lambda, lambda) / n_; }

double RecurrenceTable::correlation_det(const std::vector<double>& points) const {
  const auto m = static_cast<Eigen::Index>(points.size());
  if (m == 0) return 1.0;
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      K(i, j) = K(j, i) = cd_kernel(points[i], points[j]);
    }
  }
  return K.partialPivLu().determinant();
}

Eigen::MatrixXd RecurrenceTable::jacobi_matrix() const {
  const int dim = n1() + 1;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
  for (int l = 0; l < dim; ++l) {
    T(l, l) = q_[l];
    if (l + 1 < dim) T(l, l + 1) = T(l + 1, l) = J_[l];
  }
  return T;
}

RecurrenceTable recurrence_coefficients(const QuadratureGrid& grid, const Potential& potential, int n,
                                        const RecurrenceOptions& options) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "recurrence_coefficients: n must be positive");
  const int n1 = extended_length(n, options.epsilon);
  const std::size_t N = grid.nodes.size();
  if (N < static_cast<std::size_t>(n1 + 2)) {
    throw Error(ErrorKind::InvalidInput, "recurrence_coefficients: grid has fewer nodes than requested length");
  }
  double v_ref = std::numeric_limits<double>::infinity();
  for (double x : grid.nodes) v_ref = std::min(v_ref, potential.value(x));
  std::vector<double> s(N);
  CompensatedSum z;
  for (std::size_t i = 0; i < N; ++i) {
    // take the square root before exponentiating: e^{-n(V - v_ref)} itself
    // underflows well inside the region where ψ_l is still significant
    s[i] = std::sqrt(grid.weights[i]) * std::exp(-0.5 * n * (potential.value(grid.nodes[i]) - v_ref));
    z.add(s[i] * s[i]);
  }
  const double log_norm = std::log(z.value());

  auto run = [&](bool extended) { return lanczos(grid.nodes, s, n1 + 1, extended); };
  bool extended = options.precision == PrecisionMode::Extended;
  LanczosResult res = run(extended);
  if (res.drift > kDriftLimit && options.precision == PrecisionMode::Auto && n > 300 && !extended) {
    extended = true;
    res = run(true);
  }
  if (res.drift > kDriftLimit) {
    std::ostringstream os;
    os << "recurrence_coefficients: orthogonality drift " << res.drift << " exceeds " << kDriftLimit
       << (extended ? "" : "; retry with extended precision");
    throw Error(ErrorKind::Precision, os.str());
  }
  double raw_q = 0.0;
  if (potential.is_even()) {
    for (double& q : res.q) {
      raw_q = std::max(raw_q, std::abs(q));
      q = 0.0;
    }
  }
  RecurrenceTable table(potential, n, std::move(res.J), std::move(res.q), v_ref, log_norm, grid);
  table.set_diagnostics(res.drift, extended, raw_q);
  return table;
}

RecurrenceTable build_recurrence(const Potential& potential, int n, const RecurrenceOptions& options) {
  const auto eq = solve_equilibrium(potential);
  const double radius = std::max(std::abs(eq.left_endpoint()), std::abs(eq.right_endpoint()));
  const int n1 = extended_length(n, options.epsilon);
  GridOptions grid_options = options.grid;
  if (grid_options.support_length <= 0.0) {
    for (const auto& [lo, hi] : eq.intervals()) grid_options.support_length += hi - lo;
  }
  const auto grid = build_grid(potential, n, n1, radius, grid_options);
  return recurrence_coefficients(grid, potential, n, options);
}

Eigen::MatrixXcd jacobi_resolvent_entries(const RecurrenceTable& table, std::complex<double> z,
                                          const std::vector<int>& rows, const std::vector<int>& cols) {
  if (std::abs(z.imag()) < 1e-12) {
    throw Error(ErrorKind::InvalidInput, "jacobi_resolvent_entries: |Im z| below 1e-12 is too close to the spectrum");
  }
  const int dim = table.n1() + 1;
  const auto& J = table.J();
  const auto& q = table.q();
  for (int r : rows) {
    if (r < 0 || r >= dim) throw Error(ErrorKind::InvalidInput, "jacobi_resolvent_entries: row out of range");
  }
  // Thomas factorization of T - zI; pivots satisfy |Im d_k| ≥ |Im z| > 0.
  std::vector<std::complex<double>> d(dim), l(dim, 0.0);
  d[0] = q[0] - z;
  for (int k = 1; k < dim; ++k) {
    l[k] = J[k - 1] / d[k - 1];
    d[k] = (q[k] - z) - l[k] * J[k - 1];
  }
  Eigen::MatrixXcd out(rows.size(), cols.size());
  std::vector<std::complex<double>> x(dim);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const int col = cols[c];
    if (col < 0 || col >= dim) throw Error(ErrorKind::InvalidInput, "jacobi_resolvent_entries: column out of range");
    std::fill(x.begin(), x.end(), 0.0);
    x[col] = 1.0;
    for (int k = col + 1; k < dim; ++k) x[k] = -l[k] * x[k - 1];
    x[dim - 1] /= d[dim - 1];
    for (int k = dim - 2; k >= 0; --k) x[k] = (x[k] - J[k] * x[k + 1]) / d[k];
    for (std::size_t r = 0; r < rows.size(); ++r) out(r, c) = x[rows[r]];
  }
  return out;
}

}  // namespace edgelab
