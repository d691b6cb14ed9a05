#include "cellres/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "cellres/error.hpp"
#include "gauss_legendre.hpp"

namespace cellres {

namespace {
// Tolerances relative to a near-zero integral are unreachable; bound the bisection.
constexpr unsigned kMaxDepth = 12;
}  // namespace

void CompensatedSum::add(double value) noexcept {
  const double t = sum_ + value;
  if (std::abs(sum_) >= std::abs(value)) {
    correction_ += (sum_ - t) + value;
  } else {
    correction_ += (value - t) + sum_;
  }
  sum_ = t;
}


QuadratureRule gauss_legendre(std::size_t n, double lo, double hi) {
  return detail::gauss_legendre<double>(n, lo, hi);
}

double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          double rel_tol, double* abs_error) {
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, lo, hi, kMaxDepth, rel_tol, &err);
  if (abs_error) *abs_error = err;
  return value;
}

double trapezoid(const std::function<double(double)>& f, double lo, double hi,
                 std::size_t panels) {
  if (panels == 0) throw ValidationError("trapezoid rule needs at least one panel");
  const double h = (hi - lo) / static_cast<double>(panels);
  CompensatedSum sum;
  sum.add(0.5 * f(lo));
  for (std::size_t k = 1; k < panels; ++k) sum.add(f(lo + static_cast<double>(k) * h));
  sum.add(0.5 * f(hi));
  return h * sum.value();
}

}  // namespace cellres
