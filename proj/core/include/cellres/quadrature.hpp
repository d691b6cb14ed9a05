#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cellres {

template <class Real>
struct BasicQuadratureRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};
using QuadratureRule = BasicQuadratureRule<double>;

/// n-point Gauss-Legendre rule mapped to [lo, hi]. Nodes are computed by
/// Newton iteration on P_n, accurate to a few ulps for n <= 200.
QuadratureRule gauss_legendre(std::size_t n, double lo, double hi);

/// Adaptive Gauss-Kronrod (61-point) integral of f over [lo, hi].
/// `rel_tol` bounds the estimated relative error; `abs_error` receives the estimate.
double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          double rel_tol = 1e-13, double* abs_error = nullptr);

/// Composite trapezoid over [lo, hi] with `panels` equal panels, summed with
/// Neumaier compensation so that heavily cancelling integrands stay accurate.
double trapezoid(const std::function<double(double)>& f, double lo, double hi,
                 std::size_t panels);

/// Compensated accumulator (Neumaier variant of Kahan summation).
class CompensatedSum {
 public:
  void add(double value) noexcept;
  double value() const noexcept { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

}  // namespace cellres
