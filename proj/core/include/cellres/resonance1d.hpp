#pragma once

#include <functional>
#include <vector>

#include "cellres/coefficients.hpp"
#include "cellres/kernels.hpp"

namespace cellres {

struct Average1DResult {
  double delta = 0.0;
  double rho = 0.0;   // naive harmonic average over [-delta/2, delta/2]
  double abar = 0.0;  // true harmonic mean
  double error = 0.0; // rho - abar
};

/// Integrals of b = 1/a over subintervals of a fixed window.
///
/// Uses the coefficient's exact primitive when it has one. Otherwise b is sampled
/// on the global grid s_k = k / quad_points covering the window and integrated by
/// the trapezoid rule, with partial panels handled through the linear interpolant.
/// Every subinterval integral is then O(1) after an O(window * quad_points) setup.
class BIntegral {
 public:
  BIntegral(const Coefficient1D& coeff, double lo, double hi, int quad_points);

  /// int_x0^x1 b(s) ds for lo <= x0 <= x1 <= hi.
  double operator()(double x0, double x1) const;

  bool exact() const noexcept { return static_cast<bool>(primitive_); }

 private:
  double primitive(double x) const;

  std::function<double(double)> primitive_;
  double h_ = 0.0;
  long long k0_ = 0;
  std::vector<double> b_;    // b at s_{k0 + i}
  std::vector<double> cum_;  // trapezoid integral from s_{k0} to s_{k0 + i}
};

/// Harmonic mean of the coefficient: the exact value when catalogued, else one-period
/// adaptive quadrature for periodic fields. Quasi-periodic fields without an exact
/// value are rejected (ValidationError).
double harmonic_mean(const Coefficient1D& coeff);

/// Naive harmonic average rho(delta) = delta / int_{-delta/2}^{delta/2} b(s) ds.
/// Requires delta >= 0.5 and quad_points >= 2.
Average1DResult rho_eps(const Coefficient1D& coeff, double delta, int quad_points = 4096);

/// S(delta) = int_delta^{2 delta} K_delta(t) rho(t) dt by the composite trapezoid rule
/// with ceil(n_trap_base * delta) panels. Requires delta >= 1 and n_trap_base >= 16.
double smoothed_average(const Coefficient1D& coeff, double delta, const Kernel& kernel,
                        int n_trap_base = 4096, int quad_points = 4096);

/// Upsilon_r(delta) = int_delta^{2 delta} K_delta(t) t^-r f(t) dt, trapezoid with
/// ceil(n_trap_base * delta) panels.
double upsilon_r(const std::function<double(double)>& f, int r, double delta,
                 const Kernel& kernel, int n_trap_base = 4096);

/// B = sup_{0<=s<=1} |int_0^s (b - <b>)|, by sampling 10^4 + 1 points of one period.
double fluctuation_bound(const Coefficient1D& coeff, int quad_points = 4096);

struct ExpansionDiagnostic {
  double delta = 0.0;
  double z = 0.0;                    // abar / delta * int_{-delta/2}^{delta/2} (b - <b>)
  std::vector<double> partial_sums;  // abar * sum_{k<=m} (-z)^k, m = 0..n_terms-1
  double B = 0.0;
  double threshold = 0.0;            // series converges for delta > threshold = 2 abar B
};

/// Geometric-series expansion of rho(delta) around abar. Periodic fields only
/// (ValidationError otherwise); throws ConvergenceConditionError when
/// delta <= 2 abar B, which is where |z| < 1 is no longer guaranteed on the
/// symmetric window.
ExpansionDiagnostic expansion_diagnostic(const Coefficient1D& coeff, double delta, int n_terms,
                                         int quad_points = 4096);

}  // namespace cellres
