#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cellres {

enum class PeriodKind { periodic, quasi_periodic };

std::string_view to_string(PeriodKind kind);

/// Scalar oscillatory coefficient a(s) in the fast variable s = x / epsilon.
///
/// `b_primitive`, when present, is an exact antiderivative of b = 1/a with
/// b_primitive(0) = 0. It lets the naive harmonic average be evaluated without
/// quadrature error, which matters for discontinuous fields.
struct Coefficient1D {
  std::string name;
  std::function<double(double)> eval;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  PeriodKind period_kind = PeriodKind::periodic;
  std::optional<double> exact_harmonic_mean;
  std::function<double(double)> b_primitive;

  double operator()(double s) const { return eval(s); }
  bool has_exact_primitive() const noexcept { return static_cast<bool>(b_primitive); }
};

/// Homogenized diagonal entries quoted from an external computation.
struct ReferenceTensor {
  double a11 = 0.0;
  double a22 = 0.0;
  std::string provenance;
};

/// Isotropic 2D coefficient: the conductivity tensor is a(x1, x2) * I.
struct Coefficient2D {
  std::string name;
  std::function<double(double, double)> eval;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  PeriodKind period_kind = PeriodKind::periodic;
  std::optional<ReferenceTensor> reference_tensor;

  double operator()(double x1, double x2) const { return eval(x1, x2); }
};

/// Catalogued 1D fields: "a1", "a2", "a3". Throws CatalogueError otherwise.
Coefficient1D catalogue_1d(std::string_view name);

/// Catalogued 2D fields: "case2", "case2s", "case4". Throws CatalogueError otherwise.
Coefficient2D catalogue_2d(std::string_view name);

std::vector<std::string> catalogue_1d_names();
std::vector<std::string> catalogue_2d_names();

/// User-defined 1D field. Validates 0 < lower <= upper.
Coefficient1D make_coefficient_1d(std::string name, std::function<double(double)> eval,
                                  double lower_bound, double upper_bound, PeriodKind kind,
                                  std::optional<double> exact_harmonic_mean = std::nullopt,
                                  std::function<double(double)> b_primitive = {});

/// User-defined 2D field. Validates 0 < lower <= upper.
Coefficient2D make_coefficient_2d(std::string name, std::function<double(double, double)> eval,
                                  double lower_bound, double upper_bound, PeriodKind kind,
                                  std::optional<ReferenceTensor> reference = std::nullopt);

Coefficient1D constant_coefficient_1d(double value);
Coefficient2D constant_coefficient_2d(double value);

/// a(x1, x2) := base(x1). Its homogenized a11 is the harmonic mean of base.
Coefficient2D layered_coefficient(const Coefficient1D& base);

/// a(x1, x2) := source(x2, x1).
Coefficient2D swapped(const Coefficient2D& source);

}  // namespace cellres
