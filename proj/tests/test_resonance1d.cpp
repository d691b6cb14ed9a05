#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cellres/error.hpp"
#include "cellres/resonance1d.hpp"

using namespace cellres;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// rho for a1 straight from its closed-form primitive, independent of the library.
double rho_a1(double delta) {
  const auto prim = [](double s) { return 1.1 * s + std::sin(kTwoPi * s) / kTwoPi; };
  return delta / (prim(0.5 * delta) - prim(-0.5 * delta));
}

}  // namespace

TEST_CASE("rho is exact at integer sizes for periodic fields") {
  const auto a1 = catalogue_1d("a1");
  const auto a3 = catalogue_1d("a3");
  for (int d = 1; d <= 10; ++d) {
    CHECK(std::abs(rho_eps(a1, d).error) <= 1e-12);
    CHECK(std::abs(rho_eps(a3, d).error) <= 1e-12);
  }
  CHECK(rho_eps(a1, 1).rho == doctest::Approx(10.0 / 11.0).epsilon(1e-15));
}

TEST_CASE("rho at a half-integer size matches the closed form") {
  const auto a1 = catalogue_1d("a1");
  const auto r = rho_eps(a1, 10.5);
  CHECK(r.rho == doctest::Approx(rho_a1(10.5)).epsilon(1e-14));
  CHECK(std::abs(r.error) <= 1.0 / 10.5);
  CHECK(r.rho != doctest::Approx(10.0 / 11.0).epsilon(1e-12));
  CHECK(r.abar == 10.0 / 11.0);
}

TEST_CASE("table-based b integrals agree with the primitive for a smooth field") {
  const auto a1 = catalogue_1d("a1");
  auto no_primitive = a1;
  no_primitive.b_primitive = {};
  for (double d : {1.0, 3.3, 10.5, 17.25}) {
    const double with = rho_eps(a1, d).rho;
    const double without = rho_eps(no_primitive, d, 4096).rho;
    // Trapezoid on a periodic analytic b plus a linear-interpolant end panel: O(h^2).
    CHECK(without == doctest::Approx(with).epsilon(1e-7));
  }
  const BIntegral exact(a1, -10, 10, 4096);
  const BIntegral table(no_primitive, -10, 10, 4096);
  CHECK(exact.exact());
  CHECK_FALSE(table.exact());
  CHECK(table(-3.0, 4.0) == doctest::Approx(7.7).epsilon(1e-12));
}

TEST_CASE("rho rejects small sizes") {
  CHECK_THROWS_AS(rho_eps(catalogue_1d("a1"), 0.4), ValidationError);
  CHECK_THROWS_AS(rho_eps(catalogue_1d("a1"), 1.0, 1), ValidationError);
}

TEST_CASE("harmonic mean falls back to quadrature for periodic fields") {
  auto a1 = catalogue_1d("a1");
  a1.exact_harmonic_mean.reset();
  CHECK(harmonic_mean(a1) == doctest::Approx(10.0 / 11.0).epsilon(1e-12));
  auto a2 = catalogue_1d("a2");
  a2.exact_harmonic_mean.reset();
  CHECK_THROWS_AS(harmonic_mean(a2), ValidationError);
}

TEST_CASE("smoothed average of a constant field is the constant") {
  const auto c = constant_coefficient_1d(2.0);
  for (const auto& k : {flat_kernel(), build_exponential_kernel(), build_polynomial_kernel(0, 0),
                        build_polynomial_kernel(1, 1), build_polynomial_kernel(2, 3)}) {
    for (double d : {1.0, 3.7, 20.0}) {
      CAPTURE(k.descriptor());
      CAPTURE(d);
      CHECK(smoothed_average(c, d, k) == doctest::Approx(2.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("flat-kernel smoothing gains an order at delta 20") {
  const auto a1 = catalogue_1d("a1");
  const double s = smoothed_average(a1, 20.0, flat_kernel());
  const double abar = 10.0 / 11.0;
  // Raw error is bounded by about abar^2 B / delta with B = 1 / (2 pi); smoothing squares it.
  CHECK(std::abs(s - abar) <= 1.0 / (20.0 * 20.0));
  CHECK(std::abs(s - abar) < 0.2 * std::abs(rho_eps(a1, 20.25).error));
}

TEST_CASE("smoothed average is insensitive to doubling the trapezoid count") {
  const auto a1 = catalogue_1d("a1");
  const double abar = 10.0 / 11.0;
  for (const auto& k : {flat_kernel(), build_polynomial_kernel(1, 1)}) {
    const double s1 = smoothed_average(a1, 20.0, k, 4096);
    const double s2 = smoothed_average(a1, 20.0, k, 8192);
    CHECK(std::abs(s1 - s2) < 0.01 * std::abs(s1 - abar));
  }
  CHECK_THROWS_AS(smoothed_average(a1, 0.9, flat_kernel()), ValidationError);
  CHECK_THROWS_AS(smoothed_average(a1, 2.0, flat_kernel(), 8), ValidationError);
}

TEST_CASE("upsilon of the zero function vanishes and flat r = 0 gives the mean") {
  const auto zero = [](double) { return 0.0; };
  CHECK(upsilon_r(zero, 2, 5.0, build_polynomial_kernel(1, 1)) == 0.0);
  const auto one = [](double) { return 1.0; };
  // int_delta^{2 delta} (1/delta) dt / t = ln 2 / delta.
  CHECK(upsilon_r(one, 1, 4.0, flat_kernel()) == doctest::Approx(std::log(2.0) / 4.0).epsilon(1e-8));
}

TEST_CASE("fluctuation bound for a1 is 1/(2 pi)") {
  const auto a1 = catalogue_1d("a1");
  CHECK(fluctuation_bound(a1) == doctest::Approx(1.0 / kTwoPi).epsilon(1e-6));
}

TEST_CASE("expansion diagnostic reproduces rho") {
  const auto a1 = catalogue_1d("a1");
  const auto d = expansion_diagnostic(a1, 5.0, 30);
  CHECK(d.partial_sums.size() == 30);
  // Integer size: the fluctuation integral vanishes.
  CHECK(std::abs(d.z) <= 1e-14);
  for (double v : d.partial_sums) CHECK(v == doctest::Approx(10.0 / 11.0).epsilon(1e-14));

  const auto e = expansion_diagnostic(a1, 5.3, 30);
  CHECK(std::abs(e.z) < 1.0);
  CHECK(e.partial_sums.back() == doctest::Approx(rho_a1(5.3)).epsilon(1e-10));
  // Successive corrections shrink geometrically with ratio |z|.
  const double c1 = e.partial_sums[2] - e.partial_sums[1];
  const double c2 = e.partial_sums[3] - e.partial_sums[2];
  CHECK(std::abs(c2 / c1) == doctest::Approx(std::abs(e.z)).epsilon(1e-9));
}

TEST_CASE("expansion diagnostic guards its convergence condition") {
  const auto a1 = catalogue_1d("a1");
  CHECK(expansion_diagnostic(a1, 0.5, 5).threshold ==
        doctest::Approx(2.0 * (10.0 / 11.0) / kTwoPi).epsilon(1e-6));
  // Two-level field: b = 1 on [0, 1/2), 41 on [1/2, 1). Mean 21, B = 10, threshold 20/21.
  const auto b = [](double s) { return s - std::floor(s) < 0.5 ? 1.0 : 41.0; };
  const auto prim = [](double s) {
    const double w = std::floor(s), t = s - w;
    return 21.0 * w + (t < 0.5 ? t : 0.5 + 41.0 * (t - 0.5));
  };
  const auto two_level = make_coefficient_1d(
      "two-level", [b](double s) { return 1.0 / b(s); }, 1.0 / 41.0, 1.0, PeriodKind::periodic,
      1.0 / 21.0, prim);
  const double threshold = 20.0 / 21.0;
  CHECK_NOTHROW(expansion_diagnostic(two_level, 1.2, 5));
  try {
    expansion_diagnostic(two_level, 0.7, 5);
    FAIL("expected ConvergenceConditionError");
  } catch (const ConvergenceConditionError& e) {
    CHECK(e.threshold() == doctest::Approx(threshold).epsilon(1e-6));
  }
  CHECK_THROWS_AS(expansion_diagnostic(catalogue_1d("a2"), 5.0, 5), ValidationError);
}
