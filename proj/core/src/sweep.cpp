#include "cellres/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cellres/error.hpp"
#include "cellres/parallel.hpp"
#include "cellres/resonance1d.hpp"

namespace cellres {

namespace {

double end_slack(double delta) { return 1e-9 * std::max(1.0, delta); }

std::string fmt(double v) { return format_double(v); }

void add_common_meta(Table& table, const SweepConfig& c) {
  table.meta.emplace_back("delta_min", fmt(c.delta_min));
  table.meta.emplace_back("delta_max", fmt(c.delta_max));
  table.meta.emplace_back("delta_step", fmt(c.delta_step));
}

}  // namespace

ErrorCurve::ErrorCurve(std::vector<double> delta, std::vector<double> value, CurveMeta m)
    : meta(std::move(m)) {
  if (delta.size() != value.size()) {
    throw ValidationError("curve delta and value lengths differ");
  }
  for (std::size_t i = 0; i < delta.size(); ++i) push_back(delta[i], value[i]);
}

void ErrorCurve::push_back(double delta, double value) {
  if (!delta_.empty() && !(delta > delta_.back())) {
    std::ostringstream msg;
    msg << "curve deltas must be strictly increasing (" << delta << " after " << delta_.back()
        << ")";
    throw ValidationError(msg.str());
  }
  delta_.push_back(delta);
  value_.push_back(value);
}

ErrorCurve curve_from_table(const Table& table, const std::string& column,
                            const std::string& delta_column) {
  CurveMeta meta;
  meta.component = column;
  for (const auto& [k, v] : table.meta) {
    if (k == "coefficient") meta.coefficient = v;
    if (k == "kernel") meta.kernel = v;
  }
  return ErrorCurve(table.column(delta_column), table.column(column), meta);
}

double max_average_spacing(double delta) { return 0.05 * std::max(1.0, delta / 10.0); }

double weighted_average(const ErrorCurve& curve, const Kernel& kernel, double delta) {
  if (!(delta > 0.0)) throw ValidationError("weighted_average needs delta > 0");
  const double lo = delta;
  const double hi = 2.0 * delta;
  const double slack = end_slack(delta);
  const double spacing = max_average_spacing(delta);
  const auto& t = curve.delta();
  const auto& v = curve.value();

  auto coverage_error = [&](const std::string& why) {
    std::ostringstream msg;
    msg << "curve does not cover [" << lo << ", " << hi << "] with spacing <= " << spacing
        << ": " << why;
    return CoverageError(msg.str());
  };

  const auto first = std::lower_bound(t.begin(), t.end(), lo - slack);
  const auto last = std::upper_bound(t.begin(), t.end(), hi + slack);
  if (first == t.end() || first == last) throw coverage_error("no samples in range");
  const auto i0 = static_cast<std::size_t>(first - t.begin());
  const auto i1 = static_cast<std::size_t>(last - t.begin());
  if (t[i0] > lo + slack) throw coverage_error("first sample is above the lower end");
  if (t[i1 - 1] < hi - slack) throw coverage_error("last sample is below the upper end");

  double sum = 0.0;
  double prev_t = 0.0;
  double prev_g = 0.0;
  for (std::size_t i = i0; i < i1; ++i) {
    // Endpoints within slack are pinned to the support so the flat kernel keeps them.
    const double ti = std::clamp(t[i], lo, hi);
    const double gi = kernel.eval_scaled(delta, ti) * v[i];
    if (i > i0) {
      const double dt = ti - prev_t;
      if (dt > spacing + slack) throw coverage_error("gap wider than allowed");
      sum += 0.5 * dt * (prev_g + gi);
    }
    prev_t = ti;
    prev_g = gi;
  }
  return sum;
}

RateFit fit_rate(const ErrorCurve& curve, double lo, double hi) {
  RateFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double d = curve.delta()[i];
    if (d < lo || d > hi) continue;
    const double v = curve.value()[i];
    if (v == 0.0) {
      ++fit.zeros_excluded;
      continue;
    }
    if (!std::isfinite(v) || !(d > 0.0)) continue;
    xs.push_back(std::log(d));
    ys.push_back(std::log(std::abs(v)));
  }
  fit.used = static_cast<int>(xs.size());
  if (xs.size() < 5) {
    std::ostringstream msg;
    msg << "rate fit on [" << lo << ", " << hi << "] needs 5 usable points, found " << xs.size()
        << " (" << fit.zeros_excluded << " zeros excluded)";
    throw InsufficientDataError(msg.str());
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw InsufficientDataError("rate fit needs at least two distinct deltas");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

ErrorCurve envelope(const ErrorCurve& curve, double window) {
  if (!(window > 0.0)) throw ValidationError("envelope window must be positive");
  ErrorCurve out;
  out.meta = curve.meta;
  if (curve.size() < 2) return out;
  const auto& d = curve.delta();
  const double start = d.front();
  const double slack = 1e-9 * std::max(1.0, window);
  // Only complete windows; a trailing sliver would report a spurious low maximum.
  const auto windows = static_cast<long long>(std::floor((d.back() - start) / window + 1e-9));
  std::size_t i = 0;
  for (long long m = 0; m < windows; ++m) {
    const double hi = start + static_cast<double>(m + 1) * window - slack;
    double best_d = 0.0;
    double best_v = -1.0;
    for (; i < d.size() && d[i] < hi; ++i) {
      const double a = std::abs(curve.value()[i]);
      if (a > best_v) {
        best_v = a;
        best_d = d[i];
      }
    }
    if (best_v >= 0.0) out.push_back(best_d, best_v);
  }
  return out;
}

ErrorCurve sampled_envelope(const std::function<double(double)>& f, double lo, double hi,
                            int windows, int samples, double width, int workers) {
  if (!(lo > 0.0) || !(hi > lo) || windows < 2 || samples < 1 || !(width > 0.0)) {
    throw ValidationError("sampled_envelope needs 0 < lo < hi, windows >= 2, samples >= 1");
  }
  const auto total = static_cast<std::size_t>(windows) * static_cast<std::size_t>(samples);
  std::vector<double> where(total);
  std::vector<double> values(total);
  const double ratio = std::log(hi / lo) / (windows - 1);
  for (int w = 0; w < windows; ++w) {
    const double d0 = lo * std::exp(ratio * w);
    for (int j = 0; j < samples; ++j) {
      where[static_cast<std::size_t>(w * samples + j)] = d0 + width * j / samples;
    }
  }
  parallel_for(total, workers, [&](std::size_t i) { values[i] = std::abs(f(where[i])); });
  ErrorCurve out;
  for (int w = 0; w < windows; ++w) {
    std::size_t best = static_cast<std::size_t>(w * samples);
    for (int j = 1; j < samples; ++j) {
      const auto i = static_cast<std::size_t>(w * samples + j);
      if (values[i] > values[best]) best = i;
    }
    out.push_back(where[best], values[best]);
  }
  return out;
}

int sign_changes(const std::vector<double>& values, double floor) {
  int count = 0;
  int last = 0;
  for (double v : values) {
    const int s = v > floor ? 1 : (v < -floor ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

void SweepConfig::validate() const {
  if (!(delta_min >= 1.0)) throw ValidationError("delta_min must be >= 1");
  if (!(delta_step > 0.0)) throw ValidationError("delta_step must be > 0");
  if (!(delta_max >= delta_min)) throw ValidationError("delta_max must be >= delta_min");
  if (averaging && !(delta_max >= 2.0 * delta_min)) {
    throw ValidationError("averaging needs delta_max >= 2 * delta_min");
  }
  if (n_base < 4) throw ValidationError("n_base must be >= 4");
  if (n_trap < 16) throw ValidationError("n_trap must be >= 16");
  if (quad_points < 2) throw ValidationError("quad_points must be >= 2");
  if (!(tol > 0.0)) throw ValidationError("tol must be > 0");
  if (max_iter < 1) throw ValidationError("max_iter must be >= 1");
  if (workers < 1) throw ValidationError("workers must be >= 1");
}

std::vector<double> SweepConfig::deltas() const {
  std::vector<double> out;
  const auto count =
      static_cast<long long>(std::floor((delta_max - delta_min) / delta_step + 1e-9));
  out.reserve(static_cast<std::size_t>(count + 1));
  for (long long k = 0; k <= count; ++k) {
    out.push_back(delta_min + static_cast<double>(k) * delta_step);
  }
  return out;
}

Table run_sweep_1d(const SweepConfig& config, const Coefficient1D& coeff) {
  config.validate();
  const Kernel kernel = parse_kernel(config.kernel);
  const auto deltas = config.deltas();

  Table table;
  table.meta.emplace_back("sweep", "1d");
  table.meta.emplace_back("coefficient", coeff.name);
  add_common_meta(table, config);
  table.meta.emplace_back("kernel", kernel.descriptor());
  table.meta.emplace_back("n_trap", std::to_string(config.n_trap));
  table.meta.emplace_back("quad_points", std::to_string(config.quad_points));
  table.meta.emplace_back("primitive", coeff.has_exact_primitive() ? "exact" : "trapezoid");
  table.meta.emplace_back("window", "[-delta/2, delta/2]");
  table.columns = {"delta", "rho", "error", "smoothed", "smoothed_error"};
  table.rows.resize(deltas.size());

  parallel_for(deltas.size(), config.workers, [&](std::size_t i) {
    const double d = deltas[i];
    try {
      const auto r = rho_eps(coeff, d, config.quad_points);
      const double s = smoothed_average(coeff, d, kernel, config.n_trap, config.quad_points);
      table.rows[i] = {d, r.rho, r.error, s, s - r.abar};
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "sweep failed at delta = " << fmt(d) << ": " << e.what();
      throw SweepError(msg.str(), d);
    }
  });
  return table;
}

Table run_sweep_2d(const SweepConfig& config, const Coefficient2D& coeff, Geometry geometry) {
  config.validate();
  const auto deltas = config.deltas();
  const SolverOptions options{config.tol, config.max_iter, Preconditioner::spectral};
  const auto ref = reference_tensor(coeff, config.reference, config.n_base, options,
                                    config.workers);

  Table table;
  table.meta.emplace_back("sweep", geometry == Geometry::square ? "square" : "tubular");
  table.meta.emplace_back("coefficient", coeff.name);
  add_common_meta(table, config);
  table.meta.emplace_back("n_base", std::to_string(config.n_base));
  table.meta.emplace_back("resolution_law", geometry == Geometry::square
                                                ? "n1 = n2 = round(n_base * delta)"
                                                : "n1 = round(n_base * delta), n2 = n_base");
  table.meta.emplace_back("domain", geometry == Geometry::square
                                        ? "[-delta/2, delta/2]^2"
                                        : "[-delta/2, delta/2] x [-1/2, 1/2]");
  table.meta.emplace_back("tol", fmt(config.tol));
  table.meta.emplace_back("max_iter", std::to_string(config.max_iter));
  table.meta.emplace_back("solver", "pcg, spectral preconditioner, mean projection");
  table.meta.emplace_back("reference", to_string(config.reference));
  table.meta.emplace_back("reference_a11", fmt(ref.a11));
  table.meta.emplace_back("reference_a22", fmt(ref.a22));
  table.meta.emplace_back("reference_source", ref.provenance);
  table.columns = {"delta", "rho11", "rho22", "rho12", "err11", "err22", "iterations"};
  table.rows.resize(deltas.size());

  parallel_for(deltas.size(), config.workers, [&](std::size_t i) {
    const double d = deltas[i];
    try {
      const Grid2D grid = geometry == Geometry::square ? Grid2D::square(d, config.n_base)
                                                       : Grid2D::tubular(d, config.n_base);
      const auto est = estimate_tensor(coeff, grid, options);
      const auto& t = est.tensor;
      table.rows[i] = {d,
                       t.a11,
                       t.a22,
                       t.a12,
                       t.a11 - ref.a11,
                       t.a22 - ref.a22,
                       static_cast<double>(est.iterations)};
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "sweep failed at delta = " << fmt(d) << ": " << e.what();
      throw SweepError(msg.str(), d);
    }
  });
  return table;
}

TubularCurves tubular_sweep(const Coefficient2D& coeff, const std::vector<double>& deltas,
                            int n_base, const SolverOptions& options, ReferenceMode reference,
                            int workers) {
  for (double d : deltas) {
    if (!(d >= 1.0)) throw ValidationError("tubular sweep needs every delta >= 1");
  }
  const auto ref = reference_tensor(coeff, reference, n_base, options, workers);
  std::vector<HomogenizedTensor> values(deltas.size());
  parallel_for(deltas.size(), workers, [&](std::size_t i) {
    try {
      values[i] = estimate_tensor(coeff, Grid2D::tubular(deltas[i], n_base), options).tensor;
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "tubular sweep failed at delta = " << fmt(deltas[i]) << ": " << e.what();
      throw SweepError(msg.str(), deltas[i]);
    }
  });
  TubularCurves out;
  out.e11.meta = {coeff.name, "", "11", n_base, options.tol};
  out.e22.meta = {coeff.name, "", "22", n_base, options.tol};
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    out.e11.push_back(deltas[i], values[i].a11 - ref.a11);
    out.e22.push_back(deltas[i], values[i].a22 - ref.a22);
  }
  return out;
}

std::string to_string(ReferenceMode mode) {
  switch (mode) {
    case ReferenceMode::matched:
      return "matched";
    case ReferenceMode::fine:
      return "fine";
    case ReferenceMode::published:
      return "published";
  }
  return "matched";
}

ReferenceMode parse_reference_mode(const std::string& text) {
  if (text == "matched") return ReferenceMode::matched;
  if (text == "fine") return ReferenceMode::fine;
  if (text == "published") return ReferenceMode::published;
  throw ValidationError("unknown reference mode '" + text +
                        "'; expected matched, fine or published");
}

}  // namespace cellres
