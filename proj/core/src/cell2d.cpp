#include "cellres/cell2d.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "cellres/error.hpp"
#include "cellres/parallel.hpp"
#include "spectral_preconditioner.hpp"

namespace cellres {

namespace {

constexpr int kFineResolution = 1024;
constexpr double kQuasiLo = 13.0;
constexpr double kQuasiStep = 0.05;
constexpr int kQuasiCount = 61;  // delta in [13, 16]

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void remove_mean(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  const double mean = s / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

void check_grid(const Grid2D& grid) {
  if (grid.n1 < 4 || grid.n2 < 4) {
    std::ostringstream msg;
    msg << "cell grid needs at least 4 nodes per direction (got " << grid.n1 << " x "
        << grid.n2 << ")";
    throw ValidationError(msg.str());
  }
  if (!(grid.delta1 > 0.0) || !(grid.delta2 > 0.0)) {
    throw ValidationError("cell grid extents must be positive");
  }
}

}  // namespace

int resolution(double delta, int n_base) {
  if (!(delta > 0.0) || n_base < 1) {
    throw ValidationError("resolution needs delta > 0 and n_base >= 1");
  }
  return static_cast<int>(std::llround(static_cast<double>(n_base) * delta));
}

Grid2D Grid2D::square(double delta, int n_base) {
  const int n = resolution(delta, n_base);
  return Grid2D{delta, delta, n, n};
}

Grid2D Grid2D::tubular(double delta, int n_base) {
  return Grid2D{delta, 1.0, resolution(delta, n_base), n_base};
}

CellOperator::CellOperator(const Grid2D& grid, const Coefficient2D& coeff) : grid_(grid) {
  check_grid(grid);
  const std::size_t n = grid.size();
  face1_.resize(n);
  face2_.resize(n);
  node_.resize(n);
  const double h1 = grid.h1();
  const double h2 = grid.h2();
  double total = 0.0;
  for (int i = 0; i < grid.n1; ++i) {
    const double x1 = grid.x1(i);
    for (int k = 0; k < grid.n2; ++k) {
      const double x2 = grid.x2(k);
      const std::size_t id = grid.index(i, k);
      face1_[id] = coeff(x1 + 0.5 * h1, x2);
      face2_[id] = coeff(x1, x2 + 0.5 * h2);
      node_[id] = coeff(x1, x2);
      total += node_[id];
    }
  }
  mean_coefficient_ = total / static_cast<double>(n);
}

void CellOperator::apply(const double* u, double* out) const {
  const int n1 = grid_.n1;
  const int n2 = grid_.n2;
  const double c1 = 1.0 / (grid_.h1() * grid_.h1());
  const double c2 = 1.0 / (grid_.h2() * grid_.h2());
  for (int i = 0; i < n1; ++i) {
    const int ip = i + 1 == n1 ? 0 : i + 1;
    const int im = i == 0 ? n1 - 1 : i - 1;
    for (int k = 0; k < n2; ++k) {
      const int kp = k + 1 == n2 ? 0 : k + 1;
      const int km = k == 0 ? n2 - 1 : k - 1;
      const std::size_t id = grid_.index(i, k);
      const double uc = u[id];
      const double flux1 = face1_[id] * (u[grid_.index(ip, k)] - uc) -
                           face1_[grid_.index(im, k)] * (uc - u[grid_.index(im, k)]);
      const double flux2 = face2_[id] * (u[grid_.index(i, kp)] - uc) -
                           face2_[grid_.index(i, km)] * (uc - u[grid_.index(i, km)]);
      out[id] = -(c1 * flux1 + c2 * flux2);
    }
  }
}

std::vector<double> CellOperator::apply(const std::vector<double>& u) const {
  if (u.size() != grid_.size()) throw ValidationError("vector size does not match the grid");
  std::vector<double> out(u.size());
  apply(u.data(), out.data());
  return out;
}

std::vector<double> CellOperator::rhs(int j) const {
  if (j != 1 && j != 2) throw ValidationError("corrector direction must be 1 or 2");
  std::vector<double> out(grid_.size());
  for (int i = 0; i < grid_.n1; ++i) {
    const int im = i == 0 ? grid_.n1 - 1 : i - 1;
    for (int k = 0; k < grid_.n2; ++k) {
      const int km = k == 0 ? grid_.n2 - 1 : k - 1;
      const std::size_t id = grid_.index(i, k);
      out[id] = j == 1 ? (face1_[id] - face1_[grid_.index(im, k)]) / grid_.h1()
                       : (face2_[id] - face2_[grid_.index(i, km)]) / grid_.h2();
    }
  }
  return out;
}

AssembledProblem assemble(const Grid2D& grid, const Coefficient2D& coeff, int j) {
  auto op = std::make_shared<const CellOperator>(grid, coeff);
  auto rhs = op->rhs(j);
  return {std::move(op), std::move(rhs)};
}

ScalarSolution solve_cell(const CellOperator& op, const std::vector<double>& rhs,
                          const SolverOptions& options) {
  const Grid2D& grid = op.grid();
  const std::size_t n = grid.size();
  if (rhs.size() != n) throw ValidationError("rhs size does not match the grid");
  if (!(options.tol > 0.0) || options.max_iter < 1) {
    throw ValidationError("solver needs tol > 0 and max_iter >= 1");
  }
  double sum = 0.0;
  double peak = 0.0;
  for (double v : rhs) {
    sum += v;
    peak = std::max(peak, std::abs(v));
  }
  if (std::abs(sum / static_cast<double>(n)) > 1e-10 * std::max(1.0, peak)) {
    throw ValidationError("cell problem rhs is not mean-zero");
  }

  ScalarSolution out;
  out.x.assign(n, 0.0);
  std::vector<double> b = rhs;
  remove_mean(b);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) return out;

  std::optional<detail::SpectralPreconditioner> spectral;
  if (options.preconditioner == Preconditioner::spectral) {
    spectral.emplace(grid.n1, grid.n2, grid.h1(), grid.h2(), op.mean_coefficient());
  }
  auto precondition = [&](const std::vector<double>& r, std::vector<double>& z) {
    if (spectral) {
      spectral->apply(r.data(), z.data());
    } else {
      z = r;
    }
    remove_mean(z);
  };

  std::vector<double> r = b;
  std::vector<double> z(n);
  std::vector<double> p(n);
  std::vector<double> ap(n);
  precondition(r, z);
  p = z;
  double rz = dot(r, z);

  for (int it = 1; it <= options.max_iter; ++it) {
    op.apply(p.data(), ap.data());
    const double alpha = rz / dot(p, ap);
    for (std::size_t i = 0; i < n; ++i) {
      out.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    remove_mean(out.x);
    remove_mean(r);
    const double rel = std::sqrt(dot(r, r)) / bnorm;
    out.history.push_back(rel);
    out.iterations = it;
    if (!std::isfinite(rel)) break;

    if (rel <= options.tol) {
      // Accept only if the true residual agrees; otherwise restart from it.
      op.apply(out.x.data(), ap.data());
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
      remove_mean(r);
      out.relative_residual = std::sqrt(dot(r, r)) / bnorm;
      if (out.relative_residual <= options.tol) return out;
      precondition(r, z);
      p = z;
      rz = dot(r, z);
      continue;
    }
    precondition(r, z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  std::ostringstream msg;
  msg << "cell solver did not reach tol " << options.tol << " within " << options.max_iter
      << " iterations on a " << grid.n1 << " x " << grid.n2 << " grid (last residual "
      << (out.history.empty() ? 0.0 : out.history.back()) << ")";
  throw NonConvergenceError(msg.str(), std::move(out.history));
}

CellSolution solve_correctors(const CellOperator& op, const SolverOptions& options) {
  CellSolution out;
  for (int j = 1; j <= 2; ++j) {
    auto s = solve_cell(op, op.rhs(j), options);
    out.residual_norm = std::max(out.residual_norm, s.relative_residual);
    out.iterations += s.iterations;
    out.chi[static_cast<std::size_t>(j - 1)] = std::move(s.x);
  }
  return out;
}

HomogenizedTensor homogenized_estimate(const CellOperator& op, const CellSolution& solution) {
  const Grid2D& g = op.grid();
  const auto& a = op.node();
  const auto& chi1 = solution.chi[0];
  const auto& chi2 = solution.chi[1];
  if (chi1.size() != g.size() || chi2.size() != g.size()) {
    throw ValidationError("corrector size does not match the grid");
  }
  const double inv2h1 = 0.5 / g.h1();
  const double inv2h2 = 0.5 / g.h2();
  double s11 = 0.0, s22 = 0.0, s12 = 0.0, s21 = 0.0;
  for (int i = 0; i < g.n1; ++i) {
    const int ip = i + 1 == g.n1 ? 0 : i + 1;
    const int im = i == 0 ? g.n1 - 1 : i - 1;
    for (int k = 0; k < g.n2; ++k) {
      const int kp = k + 1 == g.n2 ? 0 : k + 1;
      const int km = k == 0 ? g.n2 - 1 : k - 1;
      const double ac = a[g.index(i, k)];
      const double d1chi1 = (chi1[g.index(ip, k)] - chi1[g.index(im, k)]) * inv2h1;
      const double d2chi1 = (chi1[g.index(i, kp)] - chi1[g.index(i, km)]) * inv2h2;
      const double d1chi2 = (chi2[g.index(ip, k)] - chi2[g.index(im, k)]) * inv2h1;
      const double d2chi2 = (chi2[g.index(i, kp)] - chi2[g.index(i, km)]) * inv2h2;
      s11 += ac * (1.0 + d1chi1);
      s22 += ac * (1.0 + d2chi2);
      s12 += ac * d1chi2;
      s21 += ac * d2chi1;
    }
  }
  const double inv = 1.0 / static_cast<double>(g.size());
  return {s11 * inv, s22 * inv, s12 * inv, s21 * inv};
}

CellEstimate estimate_tensor(const Coefficient2D& coeff, const Grid2D& grid,
                             const SolverOptions& options) {
  const CellOperator op(grid, coeff);
  const auto solution = solve_correctors(op, options);
  return {homogenized_estimate(op, solution), solution.iterations, solution.residual_norm};
}

ReferenceValue reference_tensor(const Coefficient2D& coeff, ReferenceMode mode, int n_base,
                                const SolverOptions& options, int workers) {
  if (mode == ReferenceMode::published) {
    if (!coeff.reference_tensor) {
      throw ValidationError("coefficient '" + coeff.name + "' has no published reference tensor");
    }
    return {coeff.reference_tensor->a11, coeff.reference_tensor->a22,
            coeff.reference_tensor->provenance};
  }
  if (coeff.period_kind == PeriodKind::periodic) {
    const int n = mode == ReferenceMode::fine ? kFineResolution : n_base;
    const auto est = estimate_tensor(coeff, Grid2D{1.0, 1.0, n, n}, options);
    return {est.tensor.a11, est.tensor.a22, "cell delta=1 n=" + std::to_string(n)};
  }
  std::vector<HomogenizedTensor> values(kQuasiCount);
  parallel_for(values.size(), workers, [&](std::size_t m) {
    const double delta = kQuasiLo + kQuasiStep * static_cast<double>(m);
    values[m] = estimate_tensor(coeff, Grid2D::square(delta, n_base), options).tensor;
  });
  double a11 = 0.0;
  double a22 = 0.0;
  for (const auto& v : values) {
    a11 += v.a11;
    a22 += v.a22;
  }
  return {a11 / kQuasiCount, a22 / kQuasiCount,
          "mean over delta in [13,16] n_base=" + std::to_string(n_base)};
}

}  // namespace cellres
