#include "cellres/kernels.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "cellres/error.hpp"
#include "cellres/quadrature.hpp"
#include "gauss_legendre.hpp"

namespace cellres {

namespace {

constexpr int kMaxDegree = 8;
constexpr double kMaxCondition = 1e12;
constexpr double kExpEndpointGuard = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double bump_exponent(double x) { return 1.0 / ((x - 1.0) * (x - 2.0)); }

// Horner in extended precision: the coefficients alternate in sign and grow fast with
// p and q, so the sum cancels heavily.
double eval_polynomial(const Kernel::Polynomial& k, double x) {
  long double poly = 0.0L;
  for (auto it = k.coeffs.rbegin(); it != k.coeffs.rend(); ++it) poly = poly * x + *it;
  const double base = (x - 1.0) * (x - 2.0);
  return static_cast<double>(std::pow(base, k.q + 1) * poly);
}

// Moment systems are assembled and solved in quad precision: the monomial
// coefficients grow quickly with p and q and M a = e0 cancels heavily, so even
// long double elimination loses the digits the moment conditions depend on.
using Real = boost::multiprecision::cpp_bin_float_quad;
using Matrix = std::vector<std::vector<Real>>;

// Gaussian elimination with partial pivoting; `a` and `b` are consumed.
std::vector<Real> solve_dense(Matrix a, std::vector<Real> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (abs(a[row][col]) > abs(a[pivot][col])) pivot = row;
    }
    if (a[pivot][col] == 0) {
      throw ConditioningError("moment matrix is exactly singular",
                              std::numeric_limits<double>::infinity());
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const Real factor = a[row][col] / a[col][col];
      if (factor == 0) continue;
      for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
      b[row] -= factor * b[col];
    }
  }
  std::vector<Real> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Real s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// One step of iterative refinement on top of the direct solve.
std::vector<Real> solve_refined(const Matrix& a, const std::vector<Real>& b) {
  auto x = solve_dense(a, b);
  std::vector<Real> r(b);
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) r[i] -= a[i][k] * x[k];
  }
  const auto dx = solve_dense(a, r);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  return x;
}

Real one_norm(const Matrix& a) {
  Real best = 0;
  for (std::size_t col = 0; col < a.size(); ++col) {
    Real s = 0;
    for (const auto& row : a) s += abs(row[col]);
    best = std::max(best, s);
  }
  return best;
}

// kappa_1(A) = |A|_1 |A^-1|_1 with the inverse formed column by column.
double condition_estimate(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix inverse(n, std::vector<Real>(n));
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<Real> e(n, Real(0));
    e[col] = 1;
    const auto x = solve_dense(a, e);
    for (std::size_t row = 0; row < n; ++row) inverse[row][col] = x[row];
  }
  return static_cast<double>(Real(one_norm(a) * one_norm(inverse)));
}

double sampled_sup(const Kernel& k) {
  constexpr int kSamples = 4000;
  double best = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    best = std::max(best, std::abs(k.eval(1.0 + static_cast<double>(i) / kSamples)));
  }
  return best;
}

int parse_int(std::string_view text, std::string_view descriptor) {
  int value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError("bad integer '" + std::string(text) + "' in kernel descriptor '" +
                          std::string(descriptor) + "'");
  }
  return value;
}

}  // namespace

Kernel::Kernel(Variant variant) : variant_(std::move(variant)) {
  sup_norm_ = std::visit(
      Overloaded{[](const Flat&) { return 1.0; },
                 [this](const Polynomial&) { return sampled_sup(*this); },
                 [](const Exponential& e) { return e.norm_constant * std::exp(-4.0); }},
      variant_);
}

double Kernel::eval(double x) const {
  if (!(x >= 1.0 && x <= 2.0)) return 0.0;
  return std::visit(Overloaded{[](const Flat&) { return 1.0; },
                               [x](const Polynomial& k) { return eval_polynomial(k, x); },
                               [x](const Exponential& k) {
                                 if (x - 1.0 < kExpEndpointGuard || 2.0 - x < kExpEndpointGuard) {
                                   return 0.0;
                                 }
                                 return k.norm_constant * std::exp(bump_exponent(x));
                               }},
                    variant_);
}

double Kernel::eval_scaled(double eta, double x) const {
  if (!(eta > 0.0)) throw ValidationError("kernel scale eta must be positive");
  return eval(x / eta) / eta;
}

int Kernel::vanishing_moments() const noexcept {
  if (const auto* poly = std::get_if<Polynomial>(&variant_)) return poly->p;
  return 0;
}

std::string Kernel::descriptor() const {
  return std::visit(Overloaded{[](const Flat&) { return std::string("flat"); },
                               [](const Polynomial& k) {
                                 return "poly:p=" + std::to_string(k.p) +
                                        ",q=" + std::to_string(k.q);
                               },
                               [](const Exponential&) { return std::string("exp"); }},
                    variant_);
}

Kernel flat_kernel() { return Kernel(Kernel::Flat{}); }

Kernel build_polynomial_kernel(int p, int q) {
  if (p < 0 || q < 0 || p > kMaxDegree || q > kMaxDegree) {
    throw ValidationError("polynomial kernel requires 0 <= p, q <= " +
                          std::to_string(kMaxDegree) + " (got p=" + std::to_string(p) +
                          ", q=" + std::to_string(q) + ")");
  }
  const auto rule = detail::gauss_legendre<Real>(64, Real(1), Real(2));
  const std::size_t n = static_cast<std::size_t>(p) + 1;

  // M[r][j] = int_1^2 (x-1)^(q+1) (x-2)^(q+1) x^(j-r) dx
  Matrix moments(n, std::vector<Real>(n, Real(0)));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      Real sum = 0;
      for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
        const Real& x = rule.nodes[g];
        const Real base = pow((x - 1) * (x - 2), q + 1);
        sum += rule.weights[g] * base * pow(x, static_cast<int>(j) - static_cast<int>(r));
      }
      moments[r][j] = sum;
    }
  }

  const double cond = condition_estimate(moments);
  if (!(cond <= kMaxCondition)) {
    std::ostringstream msg;
    msg << "moment system for poly:p=" << p << ",q=" << q << " is ill-conditioned (cond ~ "
        << cond << " > " << kMaxCondition << ")";
    throw ConditioningError(msg.str(), cond);
  }

  std::vector<Real> rhs(n, Real(0));
  rhs[0] = 1;
  Kernel::Polynomial poly;
  poly.p = p;
  poly.q = q;
  for (const Real& c : solve_refined(moments, rhs)) poly.coeffs.push_back(static_cast<long double>(c));
  poly.condition_estimate = cond;
  return Kernel(std::move(poly));
}

Kernel build_exponential_kernel() {
  const double mass = integrate_adaptive(
      [](double x) {
        if (x - 1.0 < kExpEndpointGuard || 2.0 - x < kExpEndpointGuard) return 0.0;
        return std::exp(bump_exponent(x));
      },
      1.0, 2.0, 1e-14);
  return Kernel(Kernel::Exponential{1.0 / mass});
}

Kernel parse_kernel(std::string_view descriptor) {
  if (descriptor == "flat") return flat_kernel();
  if (descriptor == "exp") return build_exponential_kernel();
  constexpr std::string_view prefix = "poly:";
  if (descriptor.substr(0, prefix.size()) == prefix) {
    std::optional<int> p;
    std::optional<int> q;
    std::string_view rest = descriptor.substr(prefix.size());
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (item.size() > 2 && item.substr(0, 2) == "p=") {
        p = parse_int(item.substr(2), descriptor);
      } else if (item.size() > 2 && item.substr(0, 2) == "q=") {
        q = parse_int(item.substr(2), descriptor);
      } else {
        throw ValidationError("bad field '" + std::string(item) + "' in kernel descriptor '" +
                              std::string(descriptor) + "'");
      }
    }
    if (!p || !q) {
      throw ValidationError("kernel descriptor '" + std::string(descriptor) +
                            "' must set both p and q");
    }
    return build_polynomial_kernel(*p, *q);
  }
  throw ValidationError("unknown kernel descriptor '" + std::string(descriptor) +
                        "'; expected flat, exp or poly:p=<int>,q=<int>");
}

std::vector<MomentResidual> verify_moments(const Kernel& kernel, int r_max) {
  if (r_max < 0) throw ValidationError("r_max must be non-negative");
  const int p = kernel.vanishing_moments();
  std::vector<MomentResidual> out;
  out.reserve(static_cast<std::size_t>(r_max) + 1);
  for (int r = 0; r <= r_max; ++r) {
    MomentResidual m;
    m.r = r;
    if (std::holds_alternative<Kernel::Flat>(kernel.variant())) {
      m.moment = r == 0 ? 1.0 : (r == 1 ? std::log(2.0) : (1.0 - std::pow(2.0, 1 - r)) / (r - 1));
    } else {
      m.moment = integrate_adaptive(
          [&kernel, r](double x) { return kernel.eval(x) * std::pow(x, -r); }, 1.0, 2.0, 1e-14);
    }
    if (r == 0) {
      m.target = 1.0;
    } else if (r <= p) {
      m.target = 0.0;
    }
    m.residual = m.target ? std::abs(m.moment - *m.target) : m.moment;
    out.push_back(m);
  }
  return out;
}

}  // namespace cellres
