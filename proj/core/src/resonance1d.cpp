#include "cellres/resonance1d.hpp"

#include <cmath>
#include <sstream>

#include "cellres/error.hpp"
#include "cellres/quadrature.hpp"

namespace cellres {

namespace {

void require_quad_points(int quad_points) {
  if (quad_points < 2) throw ValidationError("quad_points must be >= 2");
}

double b_mean(const Coefficient1D& coeff) { return 1.0 / harmonic_mean(coeff); }

}  // namespace

BIntegral::BIntegral(const Coefficient1D& coeff, double lo, double hi, int quad_points) {
  require_quad_points(quad_points);
  if (!(hi >= lo)) throw ValidationError("BIntegral window must satisfy lo <= hi");
  if (coeff.has_exact_primitive()) {
    primitive_ = coeff.b_primitive;
    return;
  }
  const double n = static_cast<double>(quad_points);
  h_ = 1.0 / n;
  k0_ = static_cast<long long>(std::floor(lo * n));
  const auto k1 = static_cast<long long>(std::ceil(hi * n)) + 1;
  const auto count = static_cast<std::size_t>(k1 - k0_ + 1);
  b_.resize(count);
  cum_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    b_[i] = 1.0 / coeff(static_cast<double>(k0_ + static_cast<long long>(i)) * h_);
  }
  CompensatedSum sum;
  cum_[0] = 0.0;
  for (std::size_t i = 1; i < count; ++i) {
    sum.add(0.5 * h_ * (b_[i - 1] + b_[i]));
    cum_[i] = sum.value();
  }
}

double BIntegral::primitive(double x) const {
  if (primitive_) return primitive_(x);
  const double pos = x / h_ - static_cast<double>(k0_);
  auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= b_.size()) i = b_.size() - 2;
  const double u = (x - static_cast<double>(k0_ + static_cast<long long>(i)) * h_);
  const double slope = (b_[i + 1] - b_[i]) / h_;
  return cum_[i] + u * b_[i] + 0.5 * u * u * slope;
}

double BIntegral::operator()(double x0, double x1) const { return primitive(x1) - primitive(x0); }

double harmonic_mean(const Coefficient1D& coeff) {
  if (coeff.exact_harmonic_mean) return *coeff.exact_harmonic_mean;
  if (coeff.period_kind != PeriodKind::periodic) {
    throw ValidationError("coefficient '" + coeff.name +
                          "' is quasi-periodic and carries no exact harmonic mean");
  }
  const double mean_b =
      integrate_adaptive([&coeff](double s) { return 1.0 / coeff(s); }, 0.0, 1.0, 1e-14);
  return 1.0 / mean_b;
}

Average1DResult rho_eps(const Coefficient1D& coeff, double delta, int quad_points) {
  if (!(delta >= 0.5)) throw ValidationError("rho_eps requires delta >= 0.5");
  require_quad_points(quad_points);
  const BIntegral integral(coeff, -0.5 * delta, 0.5 * delta, quad_points);
  const double total = integral(-0.5 * delta, 0.5 * delta);
  if (!(total > 0.0) || !std::isfinite(total)) {
    std::ostringstream msg;
    msg << "integral of 1/a over the window of size " << delta << " is " << total;
    throw NumericalIntegrityError(msg.str());
  }
  Average1DResult out;
  out.delta = delta;
  out.rho = delta / total;
  out.abar = harmonic_mean(coeff);
  out.error = out.rho - out.abar;
  return out;
}

double smoothed_average(const Coefficient1D& coeff, double delta, const Kernel& kernel,
                        int n_trap_base, int quad_points) {
  if (!(delta >= 1.0)) throw ValidationError("smoothed_average requires delta >= 1");
  if (n_trap_base < 16) throw ValidationError("n_trap_base must be >= 16");
  require_quad_points(quad_points);
  const BIntegral integral(coeff, -delta, delta, quad_points);
  const auto panels = static_cast<long long>(std::ceil(static_cast<double>(n_trap_base) * delta));
  const double h = delta / static_cast<double>(panels);
  CompensatedSum sum;
  for (long long k = 0; k <= panels; ++k) {
    const double t = delta + static_cast<double>(k) * h;
    const double w = kernel.eval_scaled(delta, t);
    if (w == 0.0) continue;
    const double total = integral(-0.5 * t, 0.5 * t);
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw NumericalIntegrityError("non-positive integral of 1/a inside smoothed_average");
    }
    const double weight = (k == 0 || k == panels) ? 0.5 : 1.0;
    sum.add(weight * w * (t / total));
  }
  return h * sum.value();
}

double upsilon_r(const std::function<double(double)>& f, int r, double delta,
                 const Kernel& kernel, int n_trap_base) {
  if (!(delta >= 1.0)) throw ValidationError("upsilon_r requires delta >= 1");
  if (r < 0) throw ValidationError("upsilon_r requires r >= 0");
  if (n_trap_base < 16) throw ValidationError("n_trap_base must be >= 16");
  const auto panels = static_cast<long long>(std::ceil(static_cast<double>(n_trap_base) * delta));
  const double h = delta / static_cast<double>(panels);
  CompensatedSum sum;
  for (long long k = 0; k <= panels; ++k) {
    const double t = delta + static_cast<double>(k) * h;
    const double w = kernel.eval_scaled(delta, t);
    if (w == 0.0) continue;
    const double weight = (k == 0 || k == panels) ? 0.5 : 1.0;
    sum.add(weight * w * std::pow(t, -r) * f(t));
  }
  return h * sum.value();
}

double fluctuation_bound(const Coefficient1D& coeff, int quad_points) {
  constexpr int kSamples = 10000;
  const BIntegral integral(coeff, 0.0, 1.0, quad_points);
  const double mean = b_mean(coeff);
  double best = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double s = static_cast<double>(i) / kSamples;
    best = std::max(best, std::abs(integral(0.0, s) - mean * s));
  }
  return best;
}

ExpansionDiagnostic expansion_diagnostic(const Coefficient1D& coeff, double delta, int n_terms,
                                         int quad_points) {
  if (coeff.period_kind != PeriodKind::periodic) {
    throw ValidationError("expansion diagnostic needs a periodic coefficient; '" + coeff.name +
                          "' is " + std::string(to_string(coeff.period_kind)));
  }
  if (n_terms < 1) throw ValidationError("n_terms must be >= 1");
  if (!(delta >= 0.5)) throw ValidationError("expansion diagnostic requires delta >= 0.5");
  ExpansionDiagnostic out;
  out.delta = delta;
  const double abar = harmonic_mean(coeff);
  out.B = fluctuation_bound(coeff, quad_points);
  out.threshold = 2.0 * abar * out.B;
  if (!(delta > out.threshold)) {
    std::ostringstream msg;
    msg << "expansion needs delta > 2 abar B = " << out.threshold << " (got " << delta << ")";
    throw ConvergenceConditionError(msg.str(), out.threshold);
  }
  const BIntegral integral(coeff, -0.5 * delta, 0.5 * delta, quad_points);
  const double fluct = integral(-0.5 * delta, 0.5 * delta) - delta / abar;
  out.z = abar * fluct / delta;
  out.partial_sums.reserve(static_cast<std::size_t>(n_terms));
  double term = abar;
  double sum = 0.0;
  for (int k = 0; k < n_terms; ++k) {
    sum += term;
    out.partial_sums.push_back(sum);
    term *= -out.z;
  }
  return out;
}

}  // namespace cellres
