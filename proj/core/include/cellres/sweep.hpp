#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cellres/cell2d.hpp"
#include "cellres/coefficients.hpp"
#include "cellres/csv.hpp"
#include "cellres/kernels.hpp"

namespace cellres {

struct CurveMeta {
  std::string coefficient;
  std::string kernel;
  std::string component;
  int n_base = 0;
  double tol = 0.0;
};

/// Samples (delta, value) with strictly increasing delta.
class ErrorCurve {
 public:
  ErrorCurve() = default;
  /// Throws ValidationError unless deltas are strictly increasing and sizes match.
  ErrorCurve(std::vector<double> delta, std::vector<double> value, CurveMeta meta = {});

  void push_back(double delta, double value);

  const std::vector<double>& delta() const noexcept { return delta_; }
  const std::vector<double>& value() const noexcept { return value_; }
  std::size_t size() const noexcept { return delta_.size(); }
  bool empty() const noexcept { return delta_.empty(); }

  CurveMeta meta;

 private:
  std::vector<double> delta_;
  std::vector<double> value_;
};

/// Curve from two table columns (default: "delta" against `column`).
ErrorCurve curve_from_table(const Table& table, const std::string& column,
                            const std::string& delta_column = "delta");

/// Largest sample spacing admitted on [delta, 2 delta]: 0.05 * max(1, delta / 10).
double max_average_spacing(double delta);

/// S(delta) = sum_m w_m K_delta(t_m) v(t_m) over the samples in [delta, 2 delta], with
/// composite trapezoid weights. Throws CoverageError if the samples do not reach both
/// ends of the support or are spaced wider than max_average_spacing(delta).
double weighted_average(const ErrorCurve& curve, const Kernel& kernel, double delta);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int used = 0;
  int zeros_excluded = 0;
};

/// Least-squares line through (log delta, log |value|) for samples in [lo, hi].
/// Exact zeros are skipped and counted. Needs 5 usable points (InsufficientDataError).
RateFit fit_rate(const ErrorCurve& curve, double lo, double hi);

/// Upper envelope: the sample of largest |value| in each complete window
/// [d0 + m w, d0 + (m + 1) w), d0 the first delta, as (delta, |value|).
ErrorCurve envelope(const ErrorCurve& curve, double window = 1.0);

/// Envelope of an oscillating function sampled on demand: `windows` log-spaced window
/// starts d0 in [lo, hi], each window [d0, d0 + width) sampled at `samples` points;
/// returns (argmax delta, max |f|) per window. Evaluations run on `workers` threads.
ErrorCurve sampled_envelope(const std::function<double(double)>& f, double lo, double hi,
                            int windows, int samples = 20, double width = 1.0, int workers = 1);

/// Number of sign changes, skipping values with |v| <= floor.
int sign_changes(const std::vector<double>& values, double floor = 0.0);

enum class Geometry { square, tubular };

struct SweepConfig {
  double delta_min = 1.0;
  double delta_max = 16.0;
  double delta_step = 0.05;
  std::string kernel = "flat";
  int n_base = 32;
  int n_trap = 4096;
  int quad_points = 4096;
  double tol = 1e-10;
  int max_iter = 5000;
  int workers = 1;
  ReferenceMode reference = ReferenceMode::matched;
  bool averaging = false;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  /// delta_min + k * delta_step for k = 0.. while <= delta_max (+1e-9 slack).
  std::vector<double> deltas() const;
};

/// 1D sweep: columns delta, rho, error, smoothed, smoothed_error. The smoothed
/// columns are computed directly at each delta with `kernel` and n_trap.
Table run_sweep_1d(const SweepConfig& config, const Coefficient1D& coeff);

/// 2D sweep on square or tubular cells: columns delta, rho11, rho22, rho12, err11,
/// err22, iterations. Errors are relative to reference_tensor(config.reference).
/// Per-delta failures surface as SweepError for the smallest failing delta.
Table run_sweep_2d(const SweepConfig& config, const Coefficient2D& coeff, Geometry geometry);

struct TubularCurves {
  ErrorCurve e11;
  ErrorCurve e22;
};

/// E(delta) = rho(delta) - abar on tubular cells for each delta in the list.
TubularCurves tubular_sweep(const Coefficient2D& coeff, const std::vector<double>& deltas,
                            int n_base, const SolverOptions& options = {},
                            ReferenceMode reference = ReferenceMode::matched, int workers = 1);

std::string to_string(ReferenceMode mode);
ReferenceMode parse_reference_mode(const std::string& text);

}  // namespace cellres
