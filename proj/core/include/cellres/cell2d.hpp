#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "cellres/coefficients.hpp"

namespace cellres {

/// Periodic node grid on [-delta1/2, delta1/2) x [-delta2/2, delta2/2).
/// Node (i, k) sits at (-delta1/2 + i h1, -delta2/2 + k h2); storage index i * n2 + k.
struct Grid2D {
  double delta1 = 1.0;
  double delta2 = 1.0;
  int n1 = 4;
  int n2 = 4;

  double h1() const noexcept { return delta1 / n1; }
  double h2() const noexcept { return delta2 / n2; }
  double x1(int i) const noexcept { return -0.5 * delta1 + i * h1(); }
  double x2(int k) const noexcept { return -0.5 * delta2 + k * h2(); }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2);
  }
  std::size_t index(int i, int k) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n2) +
           static_cast<std::size_t>(k);
  }

  /// Square cell of side delta with n = round(n_base * delta) nodes per direction.
  static Grid2D square(double delta, int n_base);
  /// Tube [-delta/2, delta/2] x [-1/2, 1/2]: n1 = round(n_base * delta), n2 = n_base.
  static Grid2D tubular(double delta, int n_base);
};

/// round(n_base * delta), the node-count law shared by all sweeps.
int resolution(double delta, int n_base);

/// Conservative 5-point discretization of -div(a grad u) with periodic wraparound.
/// Face coefficients are evaluated at face midpoints.
class CellOperator {
 public:
  CellOperator(const Grid2D& grid, const Coefficient2D& coeff);

  const Grid2D& grid() const noexcept { return grid_; }

  /// out = A u. `u` and `out` must not alias and hold grid().size() values.
  void apply(const double* u, double* out) const;
  std::vector<double> apply(const std::vector<double>& u) const;

  /// Right-hand side of the corrector problem in direction j (1 or 2):
  /// (a at the +1/2 face - a at the -1/2 face) / h_j.
  std::vector<double> rhs(int j) const;

  /// a(x_{i+1/2}, x_k) and a(x_i, x_{k+1/2}).
  const std::vector<double>& face1() const noexcept { return face1_; }
  const std::vector<double>& face2() const noexcept { return face2_; }
  /// a at the nodes.
  const std::vector<double>& node() const noexcept { return node_; }

  /// Arithmetic mean of the node coefficient, used to scale the preconditioner.
  double mean_coefficient() const noexcept { return mean_coefficient_; }

 private:
  Grid2D grid_;
  std::vector<double> face1_;
  std::vector<double> face2_;
  std::vector<double> node_;
  double mean_coefficient_ = 0.0;
};

struct AssembledProblem {
  std::shared_ptr<const CellOperator> op;
  std::vector<double> rhs;
};

/// Operator and right-hand side for direction j in {1, 2}. Requires n1, n2 >= 4.
AssembledProblem assemble(const Grid2D& grid, const Coefficient2D& coeff, int j);

enum class Preconditioner { spectral, none };

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 5000;
  Preconditioner preconditioner = Preconditioner::spectral;
};

struct ScalarSolution {
  std::vector<double> x;
  double relative_residual = 0.0;  // true residual |b - A x| / |b|
  int iterations = 0;
  std::vector<double> history;     // recursive relative residual per iteration
};

/// Preconditioned CG on the singular periodic system, with the iterate and residual
/// projected to zero mean. Requires a mean-zero rhs (to 1e-10 relative to its max).
/// Throws NonConvergenceError (carrying the residual history) past max_iter.
ScalarSolution solve_cell(const CellOperator& op, const std::vector<double>& rhs,
                          const SolverOptions& options = {});

struct CellSolution {
  std::array<std::vector<double>, 2> chi;
  double residual_norm = 0.0;  // max over the two directions
  int iterations = 0;          // total over the two directions
};

/// Solves both corrector problems on one operator.
CellSolution solve_correctors(const CellOperator& op, const SolverOptions& options = {});

struct HomogenizedTensor {
  double a11 = 0.0;
  double a22 = 0.0;
  double a12 = 0.0;
  double a21 = 0.0;
};

/// rho_ij = node mean of a (delta_ij + d chi_j / d x_i), centered differences.
HomogenizedTensor homogenized_estimate(const CellOperator& op, const CellSolution& solution);

struct CellEstimate {
  HomogenizedTensor tensor;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Assemble, solve and estimate in one call.
CellEstimate estimate_tensor(const Coefficient2D& coeff, const Grid2D& grid,
                             const SolverOptions& options = {});

/// Where the reference tensor for resonance errors comes from.
///  - matched: same discretization as the sweep (delta = 1 at n_base for periodic
///    fields, mean over delta in [13, 16] at n_base for quasi-periodic ones). The
///    discretization offset then cancels in E(delta).
///  - fine: periodic fields at delta = 1, n = 1024; quasi-periodic as matched.
///  - published: the coefficient's quoted reference tensor.
enum class ReferenceMode { matched, fine, published };

struct ReferenceValue {
  double a11 = 0.0;
  double a22 = 0.0;
  std::string provenance;
};

ReferenceValue reference_tensor(const Coefficient2D& coeff, ReferenceMode mode, int n_base,
                                const SolverOptions& options = {}, int workers = 1);

}  // namespace cellres
