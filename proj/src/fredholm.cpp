#include "edgelab/fredholm.hpp"

#include <cmath>
#include <sstream>

#include "edgelab/airy.hpp"
#include "edgelab/error.hpp"
#include "edgelab/quadrature.hpp"

namespace edgelab {

Eigen::MatrixXd SymmetricKernel::gram(const std::vector<double>& nodes) const {
  const auto m = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    K(i, i) = diagonal(nodes[i]);
    for (Eigen::Index j = i + 1; j < m; ++j) K(i, j) = K(j, i) = (*this)(nodes[i], nodes[j]);
  }
  return K;
}

double AiryKernel::operator()(double t1, double t2) const { return airy_kernel(t1, t2); }
double AiryKernel::diagonal(double t) const { return edge_density(t); }

Eigen::MatrixXd AiryKernel::gram(const std::vector<double>& nodes) const {
  const auto m = static_cast<Eigen::Index>(nodes.size());
  std::vector<AiryPair> p(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) p[i] = airy_ai(nodes[i]);
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      K(i, j) = K(j, i) = airy_kernel(p[i], nodes[i], p[j], nodes[j]);
    }
  }
  return K;
}

RescaledCdKernel::RescaledCdKernel(const RecurrenceTable& table, const EdgeConstants& edge)
    : table_(table), edge_(edge), scale_(edge.gamma * std::pow(static_cast<double>(table.n()), 2.0 / 3.0)) {}

double RescaledCdKernel::to_lambda(double t) const {
  return edge_.endpoint + (edge_.side == EdgeSide::Right ? t : -t) / scale_;
}

double RescaledCdKernel::operator()(double t1, double t2) const {
  return table_.cd_kernel(to_lambda(t1), to_lambda(t2)) / scale_;
}

Eigen::MatrixXd RescaledCdKernel::gram(const std::vector<double>& nodes) const {
  const auto m = static_cast<Eigen::Index>(nodes.size());
  const int n = table_.n();
  const double jn = table_.J()[n - 1];
  std::vector<WavePair> w(nodes.size());
  std::vector<double> lam(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    lam[i] = to_lambda(nodes[i]);
    w[i] = table_.pair(n, lam[i]);
  }
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      double v;
      if (std::abs(lam[i] - lam[j]) < 1e-6 / n) {
        v = table_.cd_kernel(lam[i], lam[j]);
      } else {
        const double sc = std::exp(w[i].log_scale + w[j].log_scale);
        v = jn * (w[i].cur * w[j].prev - w[i].prev * w[j].cur) / (lam[i] - lam[j]) * sc;
      }
      K(i, j) = K(j, i) = v / scale_;
    }
  }
  return K;
}

double tail_cutoff(const SymmetricKernel& kernel, double lo) {
  double t = std::max(lo, 0.0);
  for (int it = 0; it < 4000; ++it, t += 0.25) {
    if (std::abs(kernel.diagonal(t)) < 1e-16) return t > lo ? t : lo + 1.0;
  }
  throw Error(ErrorKind::Numerical, "tail_cutoff: kernel diagonal does not decay");
}

namespace {

std::vector<Interval> finite_intervals(const SymmetricKernel& kernel, const std::vector<Interval>& intervals,
                                       std::vector<double>* cutoffs) {
  std::vector<Interval> out;
  for (const auto& iv : intervals) {
    if (!std::isfinite(iv.lo)) {
      throw Error(ErrorKind::InvalidInput, "fredholm: intervals must be bounded from the left");
    }
    if (!(iv.hi > iv.lo)) throw Error(ErrorKind::InvalidInput, "fredholm: empty or reversed interval");
    Interval f = iv;
    if (!std::isfinite(iv.hi)) {
      f.hi = tail_cutoff(kernel, iv.lo);
      if (cutoffs) cutoffs->push_back(f.hi);
    }
    out.push_back(f);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (out[i].lo < out[j].hi && out[j].lo < out[i].hi) {
        throw Error(ErrorKind::InvalidInput, "fredholm: intervals must be pairwise disjoint");
      }
    }
  }
  return out;
}

double det_on_finite(const SymmetricKernel& kernel, const std::vector<Interval>& finite, int m) {
  if (finite.empty()) return 1.0;
  std::vector<double> nodes, sw;
  for (const auto& iv : finite) {
    const auto r = gauss_legendre(m, iv.lo, iv.hi);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      nodes.push_back(r.nodes[i]);
      sw.push_back(std::sqrt(r.weights[i]));
    }
  }
  Eigen::MatrixXd A = kernel.gram(nodes);
  const Eigen::Map<const Eigen::VectorXd> s(sw.data(), static_cast<Eigen::Index>(sw.size()));
  A = -(s.asDiagonal() * A * s.asDiagonal());
  A.diagonal().array() += 1.0;
  const double det = A.partialPivLu().determinant();
  if (!std::isfinite(det) || det < -1e-12) {
    std::ostringstream os;
    os << "fredholm: determinant " << det << " is negative or not finite";
    throw Error(ErrorKind::Numerical, os.str());
  }
  return det;
}

}  // namespace

double nystrom_det(const SymmetricKernel& kernel, const std::vector<Interval>& intervals, int m) {
  if (m < 8) throw Error(ErrorKind::InvalidInput, "nystrom_det: quad_order must be at least 8");
  return det_on_finite(kernel, finite_intervals(kernel, intervals, nullptr), m);
}

FredholmResult fredholm_det(const SymmetricKernel& kernel, const std::vector<Interval>& intervals,
                            const FredholmOptions& options) {
  if (options.quad_order < 8) throw Error(ErrorKind::InvalidInput, "fredholm_det: quad_order must be at least 8");
  FredholmResult res;
  const auto finite = finite_intervals(kernel, intervals, &res.truncation);
  int m = options.quad_order;
  double prev = det_on_finite(kernel, finite, m);
  res.history.emplace_back(m, prev);
  if (finite.empty()) {
    res.det = 1.0;
    res.quad_order = m;
    return res;
  }
  for (int d = 0; d <= options.max_doublings; ++d) {
    m *= 2;
    const double cur = det_on_finite(kernel, finite, m);
    res.history.emplace_back(m, cur);
    if (std::abs(cur - prev) < options.tol) {
      res.det = cur;
      res.quad_order = m;
      return res;
    }
    prev = cur;
  }
  std::ostringstream os;
  os.precision(17);
  os << "fredholm_det: no convergence after " << options.max_doublings << " doublings; det_"
     << res.history[res.history.size() - 2].first << " = " << res.history[res.history.size() - 2].second << ", det_"
     << res.history.back().first << " = " << res.history.back().second;
  throw Error(ErrorKind::NoConvergence, os.str());
}

FredholmResult tw_cdf(double s, double tol, int quad_order) {
  if (!(tol >= 1e-12)) throw Error(ErrorKind::InvalidInput, "tw_cdf: tol must be at least 1e-12");
  FredholmOptions opt;
  opt.tol = tol;
  opt.quad_order = quad_order;
  return fredholm_det(AiryKernel{}, {Interval{s}}, opt);
}

FredholmResult hole_probability_finite_n(const RecurrenceTable& table, const EdgeConstants& edge,
                                         const std::vector<Interval>& delta, const FredholmOptions& options) {
  return fredholm_det(RescaledCdKernel(table, edge), delta, options);
}

}  // namespace edgelab
