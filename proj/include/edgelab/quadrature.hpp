#pragma once

#include <cmath>
#include <vector>

namespace edgelab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// m-point Gauss–Legendre rule on [lo, hi] (Newton on P_m, Golub–Welsch free).
QuadratureRule gauss_legendre(int m, double lo = -1.0, double hi = 1.0);

/// Composite rule: `panels` equal sub-intervals of [lo, hi], m nodes each.
QuadratureRule composite_gauss_legendre(int m, int panels, double lo, double hi);

/// Neumaier's improved Kahan summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Dot product in twice the working precision (Ogita–Rump–Oishi Dot2).
double dot2(const double* x, const double* y, std::size_t n) noexcept;

/// Compensated plain dot product (Neumaier summation of exact-rounded products).
double dot_compensated(const double* x, const double* y, std::size_t n) noexcept;

}  // namespace edgelab
