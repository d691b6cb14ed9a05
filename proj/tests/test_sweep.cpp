#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "cellres/csv.hpp"
#include "cellres/error.hpp"
#include "cellres/resonance1d.hpp"
#include "cellres/sweep.hpp"

using namespace cellres;

namespace {

ErrorCurve sampled(double lo, double hi, double step, double (*f)(double)) {
  ErrorCurve c;
  for (int k = 0; lo + k * step <= hi + 1e-9; ++k) c.push_back(lo + k * step, f(lo + k * step));
  return c;
}

std::vector<Kernel> all_kernels() {
  return {flat_kernel(), build_exponential_kernel(), build_polynomial_kernel(0, 0),
          build_polynomial_kernel(1, 1), build_polynomial_kernel(2, 3)};
}

std::string to_csv(const Table& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

}  // namespace

TEST_CASE("curves demand strictly increasing deltas") {
  CHECK_THROWS_AS(ErrorCurve({1.0, 1.0}, {0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(ErrorCurve({1.0, 2.0}, {0.0}), ValidationError);
  ErrorCurve c({1.0, 2.0}, {0.5, 0.25});
  CHECK_THROWS_AS(c.push_back(1.5, 0.0), ValidationError);
  c.push_back(3.0, 0.1);
  CHECK(c.size() == 3);
}

TEST_CASE("weighted average of a constant curve is the constant") {
  const auto curve = sampled(1.0, 40.0, 0.05, [](double) { return 1.0; });
  for (const auto& k : all_kernels()) {
    for (double d : {1.0, 2.5, 6.0, 13.3, 20.0}) {
      CAPTURE(k.descriptor());
      CAPTURE(d);
      CHECK(weighted_average(curve, k, d) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("weighted average refuses to extrapolate") {
  const auto curve = sampled(1.0, 16.0, 0.05, [](double) { return 2.0; });
  CHECK_THROWS_AS(weighted_average(curve, flat_kernel(), 9.0), CoverageError);
  const auto sparse = sampled(1.0, 16.0, 0.2, [](double) { return 2.0; });
  CHECK_THROWS_AS(weighted_average(sparse, flat_kernel(), 4.0), CoverageError);
  // Wider spacing is admitted once delta exceeds 10.
  const auto wide = sampled(10.0, 60.0, 0.1, [](double) { return 2.0; });
  CHECK(weighted_average(wide, flat_kernel(), 25.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(max_average_spacing(5.0) == 0.05);
  CHECK(max_average_spacing(40.0) == doctest::Approx(0.2));
}

TEST_CASE("weighted average of a stored 1D curve matches the direct smoothed average") {
  const auto a1 = catalogue_1d("a1");
  ErrorCurve curve;
  for (int k = 0; k <= 400; ++k) {
    const double d = 20.0 + 0.05 * k;
    curve.push_back(d, rho_eps(a1, d).rho);
  }
  // 20 panels per unit size puts the direct rule on the same nodes.
  for (const auto& k : {flat_kernel(), build_polynomial_kernel(1, 1)}) {
    CHECK(weighted_average(curve, k, 20.0) ==
          doctest::Approx(smoothed_average(a1, 20.0, k, 20)).epsilon(1e-8));
  }
}

TEST_CASE("halving the sample spacing barely moves a smooth average") {
  const auto f = [](double t) { return 1.0 + 0.3 * std::sin(2 * std::numbers::pi * t) / t; };
  for (double d : {4.0, 7.5}) {
    ErrorCurve coarse, fine;
    for (int k = 0; k <= 2000; ++k) coarse.push_back(1.0 + 0.05 * k, f(1.0 + 0.05 * k));
    for (int k = 0; k <= 4000; ++k) fine.push_back(1.0 + 0.025 * k, f(1.0 + 0.025 * k));
    for (const auto& k : {flat_kernel(), build_exponential_kernel()}) {
      const double a = weighted_average(coarse, k, d);
      const double b = weighted_average(fine, k, d);
      CHECK(std::abs(a - b) < 1e-3 * std::abs(b));
    }
  }
}

TEST_CASE("rate fit recovers exact power laws") {
  const auto curve = sampled(1.0, 100.0, 0.5, [](double d) { return 1.0 / (d * d); });
  const auto fit = fit_rate(curve, 1.0, 100.0);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.used == static_cast<int>(curve.size()));
}

TEST_CASE("rate fit of an oscillating 1/delta envelope") {
  const auto curve = sampled(10.0, 1000.0, 0.05, [](double d) {
    return 3.0 / d * (1.1 + std::sin(2 * std::numbers::pi * d));
  });
  CHECK(fit_rate(curve, 10.0, 1000.0).slope == doctest::Approx(-1.0).epsilon(0.15));
  CHECK(fit_rate(envelope(curve), 10.0, 1000.0).slope == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("rate fit skips zeros and needs five points") {
  ErrorCurve c;
  for (int k = 1; k <= 6; ++k) c.push_back(k, k == 3 ? 0.0 : 1.0 / k);
  const auto fit = fit_rate(c, 1.0, 6.0);
  CHECK(fit.zeros_excluded == 1);
  CHECK(fit.used == 5);
  CHECK_THROWS_AS(fit_rate(c, 1.0, 4.5), InsufficientDataError);
}

TEST_CASE("envelope keeps the largest sample of each complete window") {
  ErrorCurve c({1.0, 1.5, 2.0, 2.5, 3.0}, {0.1, -0.4, 0.2, 0.3, 9.0});
  const auto e = envelope(c, 1.0);
  REQUIRE(e.size() == 2);
  CHECK(e.delta()[0] == 1.5);
  CHECK(e.value()[0] == 0.4);
  CHECK(e.delta()[1] == 2.5);
  CHECK(e.value()[1] == 0.3);
}

TEST_CASE("sampled envelope and sign changes") {
  const auto f = [](double d) { return std::sin(2 * std::numbers::pi * d) / (d * d); };
  const auto e = sampled_envelope(f, 10.0, 100.0, 12, 20, 1.0, 3);
  CHECK(e.size() == 12);
  CHECK(fit_rate(e, 10.0, 101.0).slope == doctest::Approx(-2.0).epsilon(0.03));
  CHECK(sampled_envelope(f, 10.0, 100.0, 12, 20, 1.0, 1).value() == e.value());
  CHECK(sign_changes({1.0, -1.0, 2.0, 0.0, -3.0}) == 3);
  CHECK(sign_changes({1.0, -1e-12, 2.0, 1e-13, -3.0}, 1e-9) == 1);
}

TEST_CASE("sweep configuration is validated") {
  SweepConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.deltas().size() == 301);
  c.delta_max = 100.0;
  CHECK(c.deltas().size() == 1981);
  c.delta_min = 0.5;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = SweepConfig{};
  c.delta_step = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = SweepConfig{};
  c.averaging = true;
  c.delta_min = 10.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK(parse_reference_mode("fine") == ReferenceMode::fine);
  CHECK(to_string(ReferenceMode::published) == "published");
  CHECK_THROWS_AS(parse_reference_mode("coarse"), ValidationError);
}

TEST_CASE("1D sweep columns and worker independence") {
  SweepConfig c;
  c.delta_max = 6.0;
  c.n_trap = 64;
  const auto a1 = catalogue_1d("a1");
  const auto t1 = run_sweep_1d(c, a1);
  CHECK(t1.columns == std::vector<std::string>{"delta", "rho", "error", "smoothed", "smoothed_error"});
  CHECK(t1.rows.size() == 101);
  for (const auto& row : t1.rows) CHECK(std::abs(row[2]) <= 1.0 / row[0]);
  c.workers = 8;
  CHECK(to_csv(run_sweep_1d(c, a1)) == to_csv(t1));
}

TEST_CASE("2D sweep is identical across worker counts") {
  SweepConfig c;
  c.delta_max = 1.6;
  c.delta_step = 0.1;
  c.n_base = 12;
  const auto coeff = catalogue_2d("case2");
  const auto t1 = run_sweep_2d(c, coeff, Geometry::square);
  CHECK(t1.columns ==
        std::vector<std::string>{"delta", "rho11", "rho22", "rho12", "err11", "err22", "iterations"});
  CHECK(t1.rows.size() == 7);
  c.workers = 8;
  CHECK(to_csv(run_sweep_2d(c, coeff, Geometry::square)) == to_csv(t1));
  CHECK(to_csv(run_sweep_2d(c, coeff, Geometry::square)) == to_csv(t1));
}

TEST_CASE("a failing size aborts the sweep naming the smallest such size") {
  SweepConfig c;
  c.delta_min = 1.2;
  c.delta_max = 2.0;
  c.delta_step = 0.1;
  c.n_base = 12;
  c.max_iter = 2;
  c.workers = 4;
  c.reference = ReferenceMode::published;  // no reference solve
  try {
    run_sweep_2d(c, catalogue_2d("case2"), Geometry::tubular);
    FAIL("expected SweepError");
  } catch (const SweepError& e) {
    CHECK(e.delta() == doctest::Approx(1.2));
    CHECK(std::string(e.what()).find("1.2") != std::string::npos);
  }
}
