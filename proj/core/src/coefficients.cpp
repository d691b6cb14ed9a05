#include "cellres/coefficients.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cellres/error.hpp"

namespace cellres {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string join(const std::vector<std::string>& names) {
  std::ostringstream out;
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : "") << names[i];
  return out.str();
}

double sign_nonneg(double v) { return v >= 0.0 ? 1.0 : -1.0; }

// b(s) = 1.1 + cos(2 pi s)
Coefficient1D make_a1() {
  Coefficient1D c;
  c.name = "a1";
  c.eval = [](double s) { return 1.0 / (1.1 + std::cos(kTwoPi * s)); };
  c.lower_bound = 1.0 / 2.1;
  c.upper_bound = 10.0;
  c.period_kind = PeriodKind::periodic;
  c.exact_harmonic_mean = 1.0 / 1.1;
  c.b_primitive = [](double s) { return 1.1 * s + std::sin(kTwoPi * s) / kTwoPi; };
  return c;
}

// b(s) = 2.2 + cos(2 pi s) + cos(2 sqrt2 pi s); the mean of b over a growing window tends to 2.2.
Coefficient1D make_a2() {
  Coefficient1D c;
  c.name = "a2";
  c.eval = [](double s) {
    return 1.0 / (2.2 + std::cos(kTwoPi * s) + std::cos(std::numbers::sqrt2 * kTwoPi * s));
  };
  c.lower_bound = 1.0 / 4.2;
  c.upper_bound = 5.0;
  c.period_kind = PeriodKind::quasi_periodic;
  c.exact_harmonic_mean = 1.0 / 2.2;
  return c;
}

// b(s) = 2 + sign(cos(2 pi s)) with sign(0) = +1: b = 3 on [-1/4, 1/4], 1 elsewhere.
double a3_primitive(double s) {
  const double whole = std::floor(s);
  const double t = s - whole;
  double part = 0.0;
  if (t <= 0.25) {
    part = 3.0 * t;
  } else if (t <= 0.75) {
    part = 0.75 + (t - 0.25);
  } else {
    part = 1.25 + 3.0 * (t - 0.75);
  }
  return 2.0 * whole + part;
}

Coefficient1D make_a3() {
  Coefficient1D c;
  c.name = "a3";
  c.eval = [](double s) { return 1.0 / (2.0 + sign_nonneg(std::cos(kTwoPi * s))); };
  c.lower_bound = 1.0 / 3.0;
  c.upper_bound = 1.0;
  c.period_kind = PeriodKind::periodic;
  c.exact_harmonic_mean = 0.5;
  c.b_primitive = a3_primitive;
  return c;
}

// The published tensor diag(2.34348520086, 2.87329450077) is reproduced by this
// field; note the cosine in the second denominator.
Coefficient2D make_case2() {
  Coefficient2D c;
  c.name = "case2";
  c.eval = [](double x1, double x2) {
    const double s1 = 2.0 + 1.5 * std::sin(kTwoPi * x1);
    const double s2 = 2.0 + 1.5 * std::sin(kTwoPi * x2);
    const double c1 = 2.0 + 1.5 * std::cos(kTwoPi * x1);
    return s1 / s2 + s2 / c1;
  };
  // Each quotient lies in [0.5/3.5, 3.5/0.5].
  c.lower_bound = 2.0 / 7.0;
  c.upper_bound = 14.0;
  c.period_kind = PeriodKind::periodic;
  c.reference_tensor = ReferenceTensor{2.34348520086, 2.87329450077, "published"};
  return c;
}

// Symmetric sine/sine variant. Invariant under x1 <-> x2, so a11 == a22.
Coefficient2D make_case2s() {
  Coefficient2D c;
  c.name = "case2s";
  c.eval = [](double x1, double x2) {
    const double s1 = 2.0 + 1.5 * std::sin(kTwoPi * x1);
    const double s2 = 2.0 + 1.5 * std::sin(kTwoPi * x2);
    return s1 / s2 + s2 / s1;
  };
  c.lower_bound = 2.0;
  c.upper_bound = 7.0 + 1.0 / 7.0;
  c.period_kind = PeriodKind::periodic;
  return c;
}

// Laminate along (1, sqrt2); 1-periodic in x1 only.
Coefficient2D make_case4() {
  Coefficient2D c;
  c.name = "case4";
  c.eval = [](double x1, double x2) {
    return 1.0 / (1.1 + std::cos(kTwoPi * (x1 + std::numbers::sqrt2 * x2)));
  };
  c.lower_bound = 1.0 / 2.1;
  c.upper_bound = 10.0;
  c.period_kind = PeriodKind::quasi_periodic;
  c.reference_tensor =
      ReferenceTensor{1.75643523765, 1.34396605902, "published (large-size averaging)"};
  return c;
}

void check_bounds(double lower, double upper) {
  if (!(lower > 0.0) || !(upper >= lower) || !std::isfinite(upper)) {
    throw ValidationError("coefficient bounds must satisfy 0 < lower <= upper < inf");
  }
}

}  // namespace

std::string_view to_string(PeriodKind kind) {
  return kind == PeriodKind::periodic ? "periodic-1" : "quasi-periodic";
}

std::vector<std::string> catalogue_1d_names() { return {"a1", "a2", "a3"}; }
std::vector<std::string> catalogue_2d_names() { return {"case2", "case2s", "case4"}; }

Coefficient1D catalogue_1d(std::string_view name) {
  if (name == "a1") return make_a1();
  if (name == "a2") return make_a2();
  if (name == "a3") return make_a3();
  throw CatalogueError("unknown 1D coefficient '" + std::string(name) +
                       "'; valid names: " + join(catalogue_1d_names()));
}

Coefficient2D catalogue_2d(std::string_view name) {
  if (name == "case2") return make_case2();
  if (name == "case2s") return make_case2s();
  if (name == "case4") return make_case4();
  throw CatalogueError("unknown 2D coefficient '" + std::string(name) +
                       "'; valid names: " + join(catalogue_2d_names()));
}

Coefficient1D make_coefficient_1d(std::string name, std::function<double(double)> eval,
                                  double lower_bound, double upper_bound, PeriodKind kind,
                                  std::optional<double> exact_harmonic_mean,
                                  std::function<double(double)> b_primitive) {
  check_bounds(lower_bound, upper_bound);
  if (!eval) throw ValidationError("coefficient '" + name + "' has no evaluator");
  Coefficient1D c;
  c.name = std::move(name);
  c.eval = std::move(eval);
  c.lower_bound = lower_bound;
  c.upper_bound = upper_bound;
  c.period_kind = kind;
  c.exact_harmonic_mean = exact_harmonic_mean;
  c.b_primitive = std::move(b_primitive);
  return c;
}

Coefficient2D make_coefficient_2d(std::string name, std::function<double(double, double)> eval,
                                  double lower_bound, double upper_bound, PeriodKind kind,
                                  std::optional<ReferenceTensor> reference) {
  check_bounds(lower_bound, upper_bound);
  if (!eval) throw ValidationError("coefficient '" + name + "' has no evaluator");
  Coefficient2D c;
  c.name = std::move(name);
  c.eval = std::move(eval);
  c.lower_bound = lower_bound;
  c.upper_bound = upper_bound;
  c.period_kind = kind;
  c.reference_tensor = std::move(reference);
  return c;
}

Coefficient1D constant_coefficient_1d(double value) {
  std::ostringstream name;
  name << "const(" << value << ")";
  return make_coefficient_1d(
      name.str(), [value](double) { return value; }, value, value, PeriodKind::periodic, value,
      [value](double s) { return s / value; });
}

Coefficient2D constant_coefficient_2d(double value) {
  std::ostringstream name;
  name << "const(" << value << ")";
  return make_coefficient_2d(
      name.str(), [value](double, double) { return value; }, value, value, PeriodKind::periodic,
      ReferenceTensor{value, value, "exact"});
}

Coefficient2D layered_coefficient(const Coefficient1D& base) {
  auto eval = base.eval;
  return make_coefficient_2d(
      "layered(" + base.name + ")", [eval](double x1, double) { return eval(x1); },
      base.lower_bound, base.upper_bound, base.period_kind);
}

Coefficient2D swapped(const Coefficient2D& source) {
  Coefficient2D out = source;
  out.name = "swapped(" + source.name + ")";
  auto eval = source.eval;
  out.eval = [eval](double x1, double x2) { return eval(x2, x1); };
  if (source.reference_tensor) {
    out.reference_tensor = ReferenceTensor{source.reference_tensor->a22,
                                           source.reference_tensor->a11,
                                           source.reference_tensor->provenance};
  }
  return out;
}

}  // namespace cellres
