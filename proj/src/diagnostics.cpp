#include "edgelab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edgelab/error.hpp"
#include "edgelab/quadrature.hpp"

namespace edgelab {

namespace {

std::string tag(const char* base, int n) { return std::string(base) + "_n" + std::to_string(n); }

std::vector<double> uniform_grid(double lo, double hi, double step) {
  std::vector<double> g;
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= count; ++i) g.push_back(lo + i * step);
  return g;
}

// Every convergence statement needs at least three matrix sizes.
void require_sweep(ConvergenceReport& rep) {
  rep.fit_slope();
  rep.criteria.push_back(
      Criterion::make("n_value_count", static_cast<double>(rep.n_values.size()), Relation::GreaterEqual, 3.0));
}

void check_tables(const SweepInput& in) {
  if (!in.eq) throw Error(ErrorKind::InvalidInput, "diagnostics: missing equilibrium measure");
  if (in.tables.empty()) throw Error(ErrorKind::InvalidInput, "diagnostics: no tables supplied");
  for (std::size_t i = 1; i < in.tables.size(); ++i) {
    if (in.tables[i]->n() <= in.tables[i - 1]->n()) {
      throw Error(ErrorKind::InvalidInput, "diagnostics: n values must be strictly increasing");
    }
  }
}

}  // namespace

RecurrenceAsymptotics recurrence_asymptotics(const RecurrenceTable& table, const EquilibriumMeasure& eq) {
  RecurrenceAsymptotics out;
  const int n = table.n();
  out.n = n;
  out.kmax = static_cast<int>(std::floor(std::pow(static_cast<double>(n), 2.0 / 3.0) + 1e-9));
  out.kmax = std::min(out.kmax, table.n1() - n);
  const auto& J = table.J();
  const auto& q = table.q();
  const auto& g = eq.support();
  const double n2 = static_cast<double>(n) * n;
  if (g.kind == SupportKind::OneCut) {
    const double c = eq.recurrence_slope();
    for (int k = -out.kmax; k <= out.kmax; ++k) {
      const double r = J[n + k - 1] - (g.a / 2.0 + k * c / n);
      const double rq = q[n + k] - g.shift;
      out.c_empirical = std::max(out.c_empirical, n2 * std::abs(r) / (k * static_cast<double>(k) + 1.0));
      out.q_empirical = std::max(out.q_empirical, n2 * std::abs(rq) / (k * static_cast<double>(k) + 1.0));
    }
    return out;
  }
  const double a = g.a, b = g.b;
  const double gap = b * b - a * a;
  const double ca = 1.0 / (gap * std::abs(eq.master_p(a)));
  const double cb = 1.0 / (gap * std::abs(eq.master_p(b)));
  double sp = 0.0, sm = 0.0;
  int cp = 0, cm = 0;
  for (int k = -out.kmax; k <= out.kmax; ++k) {
    const double s = ((n + k) % 2 == 0) ? 1.0 : -1.0;
    const double target = 0.5 * (b - s * a) + k * (cb + s * ca) / n;
    const double r = J[n + k - 1] - target;
    out.c_empirical = std::max(out.c_empirical, n2 * std::abs(r) / (k * static_cast<double>(k) + 1.0));
    out.q_empirical = std::max(out.q_empirical, n2 * std::abs(q[n + k]) / (k * static_cast<double>(k) + 1.0));
    if (s > 0) {
      sp += J[n + k - 1];
      ++cp;
    } else {
      sm += J[n + k - 1];
      ++cm;
    }
  }
  out.mean_plus = cp ? sp / cp : 0.0;
  out.mean_minus = cm ? sm / cm : 0.0;
  out.target_plus = 0.5 * (b - a);
  out.target_minus = 0.5 * (b + a);
  return out;
}

double edge_kernel_error(const RecurrenceTable& table, const EdgeConstants& edge, const std::vector<double>& t_grid) {
  const RescaledCdKernel kn(table, edge);
  const Eigen::MatrixXd A = kn.gram(t_grid);
  const Eigen::MatrixXd B = AiryKernel{}.gram(t_grid);
  return (A - B).cwiseAbs().maxCoeff();
}

double correlation_det_error(const RecurrenceTable& table, const EdgeConstants& edge, const std::vector<double>& t) {
  const RescaledCdKernel kn(table, edge);
  return std::abs(kn.gram(t).determinant() - AiryKernel{}.gram(t).determinant());
}

double finite_edge_density(const RecurrenceTable& table, const EdgeConstants& edge, double s) {
  const double n = table.n();
  const double lam = edge.endpoint + (edge.side == EdgeSide::Right ? s : -s) / (edge.gamma * std::pow(n, 2.0 / 3.0));
  return table.finite_density(lam) * std::cbrt(n) / edge.gamma;
}

double nu_error(const RecurrenceTable& table, const EdgeConstants& edge, const std::vector<double>& s_grid) {
  double sup = 0.0;
  for (double s : s_grid) sup = std::max(sup, std::abs(finite_edge_density(table, edge, s) - edge_density(s)));
  return sup;
}

int window_half_width(int n) { return static_cast<int>(std::ceil(std::pow(static_cast<double>(n), 0.6) - 1e-12)); }

ResolventComparison resolvent_comparison(const RecurrenceTable& table, const EquilibriumMeasure& eq,
                                         std::size_t endpoint_index, std::complex<double> zeta, int M) {
  if (zeta.imag() == 0.0) throw Error(ErrorKind::InvalidInput, "resolvent_comparison: Im ζ must be nonzero");
  const EdgeConstants edge = eq.edge_constants(endpoint_index);
  const int n = table.n();
  ResolventComparison out;
  out.n = n;
  out.M = M > 0 ? M : window_half_width(n);
  const double n23 = std::pow(static_cast<double>(n), -2.0 / 3.0);
  LatticeGeometry geom;
  std::complex<double> z = edge.endpoint + n23 * zeta;
  if (eq.support().kind == SupportKind::OneCut) {
    if (edge.side == EdgeSide::Right) {
      geom.variant = LatticeVariant::OneCutRight;
    } else {
      geom.variant = LatticeVariant::OneCutLeft;
      z = edge.endpoint - n23 * zeta;
    }
  } else {
    geom.a = eq.support().a;
    geom.b = eq.support().b;
    if (edge.endpoint - eq.support().shift < 0.0) {
      throw Error(ErrorKind::InvalidInput, "resolvent_comparison: two-cut layouts are defined on the positive cut");
    }
    geom.variant = edge.side == EdgeSide::Right ? LatticeVariant::TwoCutOuter : LatticeVariant::TwoCutInner;
    geom.index_shift = two_cut_index_shift(n);
  }
  const ModelOperator op = ModelOperator::from_edge(edge);
  const auto& J = table.J();
  const auto& q = table.q();
  const int top = table.n1() - 1;  // keep l + 1 inside the table

  // D over the 4M+1 window
  const int lo = std::max(0, n - 2 * out.M);
  const int hi = std::min(top, n + 2 * out.M);
  std::vector<int> cols, rows;
  for (int l = lo; l <= hi; ++l) cols.push_back(l);
  for (int l = std::max(0, lo - 1); l <= hi + 1; ++l) rows.push_back(l);
  const Eigen::MatrixXcd Rs = rescaled_resolvent_matrix(op, geom, n, zeta, rows, cols);
  const int r0 = rows.front();
  const auto W = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXcd D(W, W);
  for (Eigen::Index i = 0; i < W; ++i) {
    const int l = cols[i];
    for (Eigen::Index k = 0; k < W; ++k) {
      std::complex<double> v = (q[l] - z) * Rs(l - r0, k) + J[l] * Rs(l + 1 - r0, k);
      if (l > 0) v += J[l - 1] * Rs(l - 1 - r0, k);
      if (i == k) v -= 1.0;
      D(i, k) = v;
    }
  }
  out.d_norm = Eigen::BDCSVD<Eigen::MatrixXcd>(D).singularValues()(0);

  // R^(n) against R* on [n-M, n]²
  std::vector<int> wc, wr;
  for (int l = std::max(0, n - out.M); l <= n; ++l) wc.push_back(l);
  for (int l = std::max(0, n - out.M - 1); l <= n + 1; ++l) wr.push_back(l);
  const Eigen::MatrixXcd Rn = jacobi_resolvent_entries(table, z, wr, wc);
  const Eigen::MatrixXcd Rw = rescaled_resolvent_matrix(op, geom, n, zeta, wc, wc);
  const int w0 = wr.front();
  const double scale = std::cbrt(static_cast<double>(n));
  for (std::size_t i = 0; i < wc.size(); ++i) {
    const int l = wc[i];
    for (std::size_t k = 0; k < wc.size(); ++k) {
      out.r_diff = std::max(out.r_diff, std::abs(Rn(l - w0, k) - Rw(i, k)) / scale);
      std::complex<double> v = (q[l] - z) * Rn(l - w0, k) + J[l] * Rn(l + 1 - w0, k);
      if (l > 0) v += J[l - 1] * Rn(l - 1 - w0, k);
      if (i == k) v -= 1.0;
      out.identity_residual = std::max(out.identity_residual, std::abs(v));
    }
  }
  return out;
}

double tail_mass(const RecurrenceTable& table, const EdgeConstants& edge, double L0) {
  const double n = table.n();
  const double start = edge.endpoint + (edge.side == EdgeSide::Right ? L0 : -L0) / (edge.gamma * std::pow(n, 2.0 / 3.0));
  double far = table.grid().L > 0.0 ? table.grid().L : std::abs(edge.endpoint) + 10.0;
  far = edge.side == EdgeSide::Right ? std::max(far, start) : std::min(-far, start);
  const double lo = std::min(start, far), hi = std::max(start, far);
  if (hi <= lo) return 0.0;
  const auto rule = composite_gauss_legendre(16, 200, lo, hi);
  CompensatedSum acc;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc.add(rule.weights[i] * table.finite_density(rule.nodes[i]));
  return n * acc.value();
}

double airy_tail_mass(double L0) {
  const auto p = airy_ai(L0);
  const double ai = p.value, aip = p.derivative;
  return (2.0 / 3.0) * L0 * L0 * ai * ai - (2.0 / 3.0) * L0 * aip * aip - ai * aip / 3.0;
}

ConvergenceReport recurrence_report(const SweepInput& in) {
  check_tables(in);
  ConvergenceReport rep;
  rep.diagnostic = "recurrence_asymptotics";
  std::vector<RecurrenceAsymptotics> rs;
  for (const auto* t : in.tables) {
    rs.push_back(recurrence_asymptotics(*t, *in.eq));
    const auto& r = rs.back();
    rep.add_sample(r.n, r.c_empirical);
    rep.metrics[tag("c_empirical", r.n)] = r.c_empirical;
    rep.metrics[tag("q_empirical", r.n)] = r.q_empirical;
    rep.metrics[tag("kmax", r.n)] = r.kmax;
  }
  require_sweep(rep);
  const auto& th = in.thresholds;
  if (in.eq->support().kind == SupportKind::OneCut) {
    for (std::size_t i = 1; i < rs.size(); ++i) {
      const double ratio = rs[i].c_empirical / rs[i - 1].c_empirical;
      const std::string name = "c_ratio_n" + std::to_string(rs[i].n) + "_over_n" + std::to_string(rs[i - 1].n);
      rep.criteria.push_back(Criterion::make(name + "_lower", ratio, Relation::GreaterEqual, th.recurrence_ratio_lo));
      rep.criteria.push_back(Criterion::make(name + "_upper", ratio, Relation::LessEqual, th.recurrence_ratio_hi));
    }
  } else {
    for (const auto& r : rs) {
      rep.metrics[tag("mean_plus", r.n)] = r.mean_plus;
      rep.metrics[tag("mean_minus", r.n)] = r.mean_minus;
      const double dev = std::max(std::abs(r.mean_plus - r.target_plus), std::abs(r.mean_minus - r.target_minus));
      rep.criteria.push_back(
          Criterion::make(tag("parity_mean_deviation", r.n), dev, Relation::LessEqual, th.parity_tolerance_factor / r.n));
    }
  }
  return rep;
}

ConvergenceReport edge_kernel_report(const SweepInput& in) {
  check_tables(in);
  ConvergenceReport rep;
  rep.diagnostic = "edge_kernel";
  const std::vector<double> grid{-2.0, -1.0, 0.0, 1.0, 2.0};
  const auto right = in.eq->right_edge();
  const auto left = in.eq->left_edge();
  std::vector<double> det_err;
  for (const auto* t : in.tables) {
    const double e = edge_kernel_error(*t, right, grid);
    const double el = edge_kernel_error(*t, left, grid);
    rep.add_sample(t->n(), e);
    rep.metrics[tag("left_edge_error", t->n())] = el;
    det_err.push_back(correlation_det_error(*t, right, {0.0, 1.0}));
    rep.metrics[tag("two_point_det_error", t->n())] = det_err.back();
  }
  require_sweep(rep);
  if (in.eq->potential().is_even()) {
    double asym = 0.0;
    for (std::size_t i = 0; i < rep.n_values.size(); ++i) {
      asym = std::max(asym, std::abs(rep.metrics[tag("left_edge_error", rep.n_values[i])] - rep.errors[i]));
    }
    rep.criteria.push_back(Criterion::make("left_right_symmetry", asym, Relation::LessEqual, 1e-10));
  }
  const int nmax = rep.n_values.back();
  rep.criteria.push_back(Criterion::make(tag("sup_error", nmax), rep.errors.back(), Relation::LessEqual,
                                         in.thresholds.kernel_error));
  if (rep.errors.size() > 1) {
    rep.criteria.push_back(Criterion::make("error_last_minus_first", rep.errors.back() - rep.errors.front(),
                                           Relation::Less, 0.0));
    for (std::size_t i = 1; i < det_err.size(); ++i) {
      rep.criteria.push_back(Criterion::make(tag("two_point_det_error_step", rep.n_values[i]),
                                             det_err[i] - det_err[i - 1], Relation::Less, 0.0));
    }
  }
  return rep;
}

ConvergenceReport nu_report(const SweepInput& in) {
  check_tables(in);
  ConvergenceReport rep;
  rep.diagnostic = "edge_density";
  const auto grid = uniform_grid(-2.0, 2.0, 0.1);
  const auto edge = in.eq->right_edge();
  double min_nu = INFINITY;
  for (const auto* t : in.tables) {
    rep.add_sample(t->n(), nu_error(*t, edge, grid));
    for (double s : grid) min_nu = std::min(min_nu, finite_edge_density(*t, edge, s));
  }
  require_sweep(rep);
  rep.metrics["min_nu_n"] = min_nu;
  rep.criteria.push_back(
      Criterion::make(tag("sup_error", rep.n_values.back()), rep.errors.back(), Relation::LessEqual, in.thresholds.nu_error));
  rep.criteria.push_back(Criterion::make("min_nu_n", min_nu, Relation::GreaterEqual, 0.0));
  if (rep.errors.size() > 1) {
    rep.criteria.push_back(
        Criterion::make("error_last_minus_first", rep.errors.back() - rep.errors.front(), Relation::Less, 0.0));
  }
  return rep;
}

ConvergenceReport resolvent_report(const SweepInput& in) {
  check_tables(in);
  ConvergenceReport rep;
  rep.diagnostic = "resolvent";
  const std::size_t idx = in.eq->endpoints().size() - 1;
  std::vector<double> rdiff;
  double worst_identity = 0.0;
  for (const auto* t : in.tables) {
    const auto rc = resolvent_comparison(*t, *in.eq, idx, {0.0, 1.0});
    rep.add_sample(t->n(), rc.d_norm);
    rdiff.push_back(rc.r_diff);
    worst_identity = std::max(worst_identity, rc.identity_residual);
    rep.metrics[tag("M", rc.n)] = rc.M;
    rep.metrics[tag("r_diff", rc.n)] = rc.r_diff;
  }
  require_sweep(rep);
  rep.metrics["identity_residual"] = worst_identity;
  rep.criteria.push_back(Criterion::make("identity_residual", worst_identity, Relation::LessEqual, 1e-12));
  if (rep.errors.size() > 1) {
    rep.criteria.push_back(Criterion::make("d_norm_slope", rep.slope, Relation::LessEqual, in.thresholds.resolvent_slope));
    for (std::size_t i = 1; i < rep.errors.size(); ++i) {
      rep.criteria.push_back(Criterion::make(tag("d_norm_step", rep.n_values[i]), rep.errors[i] - rep.errors[i - 1],
                                             Relation::Less, 0.0));
      rep.criteria.push_back(Criterion::make(tag("r_diff_ratio", rep.n_values[i]), rdiff[i] / rdiff[i - 1],
                                             Relation::LessEqual, in.thresholds.resolvent_slack));
    }
    rep.criteria.push_back(Criterion::make("r_diff_last_minus_first", rdiff.back() - rdiff.front(), Relation::Less, 0.0));
  }
  return rep;
}

ConvergenceReport tail_report(const SweepInput& in) {
  check_tables(in);
  ConvergenceReport rep;
  rep.diagnostic = "tail_mass";
  const auto edge = in.eq->right_edge();
  const double L0 = in.thresholds.tail_L0;
  rep.metrics["airy_tail"] = airy_tail_mass(L0);
  for (const auto* t : in.tables) {
    const double m4 = tail_mass(*t, edge, L0);
    const double m2 = tail_mass(*t, edge, L0 / 2.0);
    rep.add_sample(t->n(), m4);
    rep.metrics[tag("tail_half_L0", t->n())] = m2;
    rep.criteria.push_back(Criterion::make(tag("tail_mass", t->n()), m4, Relation::Less, in.thresholds.tail_mass));
    rep.criteria.push_back(Criterion::make(tag("tail_monotone", t->n()), m2 - m4, Relation::GreaterEqual, 0.0));
  }
  require_sweep(rep);
  return rep;
}

ConvergenceReport hole_probability_report(const SweepInput& in) {
  check_tables(in);
  ConvergenceReport rep;
  rep.diagnostic = "hole_probability";
  const auto edge = in.eq->right_edge();
  FredholmOptions opt;
  opt.quad_order = in.quad_order;
  const double f2 = tw_cdf(0.0, 1e-10, in.quad_order).det;
  rep.metrics["F2_0"] = f2;
  for (const auto* t : in.tables) {
    const double e = hole_probability_finite_n(*t, edge, {Interval{0.0}}, opt).det;
    rep.add_sample(t->n(), std::abs(e - f2));
    rep.metrics[tag("E_n", t->n())] = e;
  }
  require_sweep(rep);
  const auto* last = in.tables.back();
  const double whole = hole_probability_finite_n(*last, edge, {Interval{0.0}}, opt).det;
  const double split = hole_probability_finite_n(*last, edge, {Interval{0.0, 1.0}, Interval{1.0}}, opt).det;
  rep.criteria.push_back(
      Criterion::make(tag("abs_error", last->n()), rep.errors.back(), Relation::LessEqual, in.thresholds.hole_error));
  rep.criteria.push_back(
      Criterion::make("split_consistency", std::abs(whole - split), Relation::LessEqual, in.thresholds.split_tolerance));
  return rep;
}

}  // namespace edgelab
