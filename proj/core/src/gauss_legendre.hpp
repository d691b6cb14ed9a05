#pragma once

#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <limits>

#include "cellres/error.hpp"
#include "cellres/quadrature.hpp"

namespace cellres::detail {

// Gauss-Legendre rule on [lo, hi] in any floating type with std-style cos/abs.
template <class Real>
BasicQuadratureRule<Real> gauss_legendre(std::size_t n, Real lo, Real hi) {
  if (n == 0) throw ValidationError("Gauss-Legendre rule needs at least one node");
  using std::abs;
  using std::cos;
  BasicQuadratureRule<Real> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const Real half = (hi - lo) / 2;
  const Real mid = (hi + lo) / 2;
  const Real pi = boost::math::constants::pi<Real>();
  const Real eps = std::numeric_limits<Real>::epsilon();
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    Real x = cos(pi * (static_cast<Real>(i) + Real(0.75)) / (static_cast<Real>(n) + Real(0.5)));
    Real dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Real p0 = 1;
      Real p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const Real kk = static_cast<Real>(k);
        const Real p2 = ((2 * kk - 1) * x * p1 - (kk - 1) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<Real>(n) * (x * p1 - p0) / (x * x - 1);
      const Real dx = p1 / dp;
      x -= dx;
      if (abs(dx) < eps) break;
    }
    const Real w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}


}  // namespace cellres::detail
