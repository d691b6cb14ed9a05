#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cellres {

/// Averaging kernel supported on [1, 2] with unit mass.
///
/// Three families are provided:
///  - flat:        K(x) = 1.
///  - polynomial:  K(x) = (x-1)^(q+1) (x-2)^(q+1) * sum_j c_j x^j, j = 0..p, with the
///                 coefficients fixed by  int K x^-r dx = [r == 0]  for r = 0..p.
///                 K and its first q derivatives vanish at both endpoints.
///  - exponential: K(x) = C exp(1 / ((x-1)(x-2))), smooth with all derivatives vanishing.
///
/// Kernels are immutable once built and can be shared between threads.
class Kernel {
 public:
  struct Flat {};
  struct Polynomial {
    int p = 0;
    int q = 0;
    std::vector<long double> coeffs;  // c_0 .. c_p, extended precision (they cancel heavily)
    double condition_estimate = 1.0;
  };
  struct Exponential {
    double norm_constant = 0.0;
  };
  using Variant = std::variant<Flat, Polynomial, Exponential>;

  explicit Kernel(Variant variant);

  /// K(x); exactly zero outside [1, 2].
  double eval(double x) const;
  double operator()(double x) const { return eval(x); }

  /// K_eta(x) = K(x / eta) / eta, supported on [eta, 2 eta].
  double eval_scaled(double eta, double x) const;

  /// Number of vanishing negative moments (p); 0 for the flat and exponential kernels.
  int vanishing_moments() const noexcept;

  /// Sup-norm over [1, 2] (sampled on a fine grid for the polynomial family).
  double sup_norm() const noexcept { return sup_norm_; }

  /// CLI descriptor: "flat", "exp" or "poly:p=<p>,q=<q>".
  std::string descriptor() const;

  const Variant& variant() const noexcept { return variant_; }

 private:
  Variant variant_;
  double sup_norm_ = 1.0;
};

Kernel flat_kernel();

/// Polynomial member with p vanishing negative moments and C^q endpoint vanishing.
/// Requires 0 <= p, q <= 8 (ValidationError); throws ConditioningError when the
/// moment system's 1-norm condition estimate exceeds 1e12.
Kernel build_polynomial_kernel(int p, int q);

/// Exponential bump normalized to unit mass by adaptive quadrature.
Kernel build_exponential_kernel();

/// Parses a CLI descriptor (see Kernel::descriptor). Throws ValidationError.
Kernel parse_kernel(std::string_view descriptor);

struct MomentResidual {
  int r = 0;
  double moment = 0.0;          // int_1^2 K(x) x^-r dx
  std::optional<double> target; // 1 for r = 0, 0 for 1 <= r <= p, none beyond p
  double residual = 0.0;        // |moment - target|, or the raw moment when no target
};

/// Moments r = 0..r_max computed by adaptive Gauss-Kronrod quadrature, which is
/// independent of the Gauss-Legendre rule used to construct polynomial kernels.
std::vector<MomentResidual> verify_moments(const Kernel& kernel, int r_max);

}  // namespace cellres
