#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "cellres/cellres.hpp"
#include "cellres/parallel.hpp"

namespace cellres::cli {

namespace {

// Options that never enter the metadata header: they do not change the numbers.
bool is_bookkeeping(const std::string& name) {
  return name == "help" || name == "config" || name == "output" || name == "workers";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct State {
  std::string output = "-";
  std::string config;
  int workers = 1;

  std::string kernel = "flat";
  int rmax = 4;

  std::string coeff;
  double delta_min = 1.0;
  double delta_max = 0.0;
  double delta_step = 0.05;
  int n_trap = 4096;
  int quad_points = 4096;
  int n_base = 32;
  double tol = 1e-10;
  int max_iter = 5000;
  std::string reference = "matched";

  std::string input;
  std::vector<double> deltas;
  std::vector<std::string> columns;
  double lo = 10.0;
  double hi = 100.0;
  double envelope_window = 0.0;

  std::string f = "sin";
  int r = 2;
};

struct Commands {
  CLI::App* kernel_build = nullptr;
  CLI::App* kernel_verify = nullptr;
  CLI::App* sweep1d = nullptr;
  CLI::App* sweep2d = nullptr;
  CLI::App* tubular = nullptr;
  CLI::App* average = nullptr;
  CLI::App* rates = nullptr;
  CLI::App* demo = nullptr;
};

void add_io(CLI::App* sub, State& s) {
  sub->add_option("--output,-o", s.output, "CSV destination ('-' for stdout)");
  sub->add_option("--config", s.config, "file of 'key = value' lines; flags take precedence");
}

void add_range(CLI::App* sub, State& s, double delta_max) {
  s.delta_max = delta_max;
  sub->add_option("--delta-min", s.delta_min, "smallest domain size (periods)");
  sub->add_option("--delta-max", s.delta_max, "largest domain size (periods)");
  sub->add_option("--delta-step", s.delta_step, "domain size spacing");
}

Commands build_app(CLI::App& app, State& s) {
  app.option_defaults()->always_capture_default();
  app.failure_message(CLI::FailureMessage::help);
  app.require_subcommand(1);
  Commands c;

  auto* kernel = app.add_subcommand("kernel", "build or check averaging kernels");
  kernel->require_subcommand(1);
  c.kernel_build = kernel->add_subcommand("build", "print kernel coefficients");
  c.kernel_build->add_option("--kernel", s.kernel, "flat | exp | poly:p=<int>,q=<int>");
  add_io(c.kernel_build, s);
  c.kernel_verify = kernel->add_subcommand("verify", "print moment residuals r, moment, target, residual");
  c.kernel_verify->add_option("--kernel", s.kernel, "flat | exp | poly:p=<int>,q=<int>");
  c.kernel_verify->add_option("--rmax", s.rmax, "largest moment order")->check(CLI::NonNegativeNumber);
  add_io(c.kernel_verify, s);

  c.sweep1d = app.add_subcommand("sweep1d", "naive and smoothed 1D harmonic averages");
  c.sweep1d->add_option("--coeff", s.coeff, "a1 | a2 | a3")->default_str("a1");
  add_range(c.sweep1d, s, 100.0);
  c.sweep1d->add_option("--kernel", s.kernel, "kernel for the smoothed column");
  c.sweep1d->add_option("--ntrap", s.n_trap, "trapezoid panels per unit delta");
  c.sweep1d->add_option("--quad-points", s.quad_points, "b samples per period without a primitive");
  c.sweep1d->add_option("--workers", s.workers, "concurrent evaluations")->check(CLI::PositiveNumber);
  add_io(c.sweep1d, s);

  for (auto** slot : {&c.sweep2d, &c.tubular}) {
    const bool tube = slot == &c.tubular;
    auto* sub = app.add_subcommand(tube ? "tubular" : "sweep2d",
                                   tube ? "cell problems on [-d/2,d/2] x [-1/2,1/2]"
                                        : "cell problems on [-d/2,d/2]^2");
    sub->add_option("--coeff", s.coeff, "case2 | case2s | case4")->default_str("case2");
    add_range(sub, s, 16.0);
    sub->add_option("--nbase", s.n_base, tube ? "nodes per period (x2 resolution)"
                                              : "nodes per period");
    sub->add_option("--tol", s.tol, "relative residual tolerance");
    sub->add_option("--max-iter", s.max_iter, "iteration cap per solve");
    sub->add_option("--reference", s.reference, "matched | fine | published");
    sub->add_option("--workers", s.workers, "concurrent solves")->check(CLI::PositiveNumber);
    add_io(sub, s);
    *slot = sub;
  }

  c.average = app.add_subcommand("average", "kernel-weighted averages of a stored curve");
  c.average->add_option("--input", s.input, "CSV from a sweep")->required();
  c.average->add_option("--kernel", s.kernel, "flat | exp | poly:p=<int>,q=<int>");
  c.average->add_option("--delta", s.deltas, "averaging size(s)")->required();
  c.average->add_option("--column", s.columns,
                        "column(s) to average (default: every column but delta/iterations)");
  add_io(c.average, s);

  c.rates = app.add_subcommand("rates", "log-log slope of |column| against delta");
  c.rates->add_option("--input", s.input, "CSV from a sweep")->required();
  c.rates->add_option("--column", s.columns, "column (default: error, else err11)");
  c.rates->add_option("--lo", s.lo, "window start");
  c.rates->add_option("--hi", s.hi, "window end");
  c.rates->add_option("--envelope", s.envelope_window,
                      "fit window maxima of this width instead of all samples (0: off)");
  add_io(c.rates, s);

  c.demo = app.add_subcommand("demo-lemma", "decay of t^-r f(t) and its kernel average");
  c.demo->add_option("--f", s.f, "sin: 1.1 + sin(2 pi s) | square: 2 + sign(cos(2 pi s))");
  c.demo->add_option("--r", s.r, "power of 1/t")->check(CLI::NonNegativeNumber);
  c.demo->add_option("--kernel", s.kernel, "flat | exp | poly:p=<int>,q=<int>");
  add_range(c.demo, s, 100.0);
  c.demo->add_option("--ntrap", s.n_trap, "trapezoid panels per unit delta");
  add_io(c.demo, s);
  return c;
}

CLI::App* leaf(CLI::App& app) {
  CLI::App* cur = &app;
  for (;;) {
    auto subs = cur->get_subcommands();
    if (subs.empty()) return cur;
    cur = subs.front();
  }
}

std::string command_path(CLI::App& app) {
  std::string path;
  CLI::App* cur = &app;
  for (;;) {
    auto subs = cur->get_subcommands();
    if (subs.empty()) return path;
    cur = subs.front();
    path += (path.empty() ? "" : " ") + cur->get_name();
  }
}

std::string option_key(const CLI::Option* opt) {
  return opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
}

std::string effective_value(const CLI::Option* opt) {
  if (opt->count() == 0) return opt->get_default_str();
  std::string joined;
  for (const auto& r : opt->results()) joined += (joined.empty() ? "" : " ") + r;
  return joined;
}

std::vector<std::pair<std::string, std::string>> effective_parameters(CLI::App& app) {
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("command", command_path(app));
  for (const auto* opt : leaf(app)->get_options()) {
    const auto key = option_key(opt);
    if (is_bookkeeping(key)) continue;
    meta.emplace_back("--" + key, effective_value(opt));
  }
  return meta;
}

void emit(const Table& table, const State& s, std::ostream& out) {
  if (s.output.empty() || s.output == "-") {
    write_csv(out, table);
  } else {
    write_csv_file(s.output, table);
  }
}

void prepend_meta(Table& table, std::vector<std::pair<std::string, std::string>> meta) {
  meta.insert(meta.end(), table.meta.begin(), table.meta.end());
  table.meta = std::move(meta);
}

Table kernel_build(const State& s) {
  const Kernel k = parse_kernel(s.kernel);
  Table t;
  t.meta.emplace_back("kernel", k.descriptor());
  t.meta.emplace_back("vanishing_moments", std::to_string(k.vanishing_moments()));
  t.meta.emplace_back("sup_norm", format_double(k.sup_norm()));
  t.columns = {"j", "coefficient"};
  std::visit(
      [&t](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Kernel::Polynomial>) {
          t.meta.emplace_back("form", "(x-1)^(q+1) (x-2)^(q+1) sum_j c_j x^j");
          t.meta.emplace_back("condition_estimate", format_double(v.condition_estimate));
          for (std::size_t j = 0; j < v.coeffs.size(); ++j) {
            t.rows.push_back({static_cast<double>(j), static_cast<double>(v.coeffs[j])});
          }
        } else if constexpr (std::is_same_v<V, Kernel::Exponential>) {
          t.meta.emplace_back("form", "C exp(1 / ((x-1)(x-2)))");
          t.rows.push_back({0.0, v.norm_constant});
        } else {
          t.meta.emplace_back("form", "1");
          t.rows.push_back({0.0, 1.0});
        }
      },
      k.variant());
  return t;
}

Table kernel_verify(const State& s) {
  const Kernel k = parse_kernel(s.kernel);
  Table t;
  t.meta.emplace_back("kernel", k.descriptor());
  t.columns = {"r", "moment", "target", "residual"};
  for (const auto& m : verify_moments(k, s.rmax)) {
    t.rows.push_back({static_cast<double>(m.r), m.moment,
                      m.target ? *m.target : std::numeric_limits<double>::quiet_NaN(),
                      m.residual});
  }
  return t;
}

SweepConfig sweep_config(const State& s) {
  SweepConfig c;
  c.delta_min = s.delta_min;
  c.delta_max = s.delta_max;
  c.delta_step = s.delta_step;
  c.kernel = s.kernel;
  c.n_base = s.n_base;
  c.n_trap = s.n_trap;
  c.quad_points = s.quad_points;
  c.tol = s.tol;
  c.max_iter = s.max_iter;
  c.workers = s.workers;
  c.reference = parse_reference_mode(s.reference);
  return c;
}

Table average(const State& s) {
  const Table in = read_csv_file(s.input);
  const Kernel k = parse_kernel(s.kernel);
  std::vector<std::string> columns = s.columns;
  if (columns.empty()) {
    for (const auto& c : in.columns) {
      if (c != "delta" && c != "iterations") columns.push_back(c);
    }
  }
  Table t;
  for (const auto& [key, value] : in.meta) {
    if (key == "coefficient" || key == "sweep" || key.rfind("reference", 0) == 0) {
      t.meta.emplace_back("input." + key, value);
    }
  }
  t.columns = {"delta"};
  std::vector<ErrorCurve> curves;
  for (const auto& c : columns) {
    curves.push_back(curve_from_table(in, c));
    t.columns.push_back("S_" + c);
  }
  for (double d : s.deltas) {
    std::vector<double> row{d};
    for (const auto& curve : curves) row.push_back(weighted_average(curve, k, d));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table rates(const State& s) {
  const Table in = read_csv_file(s.input);
  std::string column;
  if (!s.columns.empty()) {
    column = s.columns.front();
  } else {
    column = "error";
    bool found = false;
    for (const auto& c : in.columns) found = found || c == column;
    if (!found) column = "err11";
  }
  auto curve = curve_from_table(in, column);
  if (s.envelope_window > 0.0) {
    std::vector<double> d;
    std::vector<double> v;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (curve.delta()[i] >= s.lo && curve.delta()[i] <= s.hi) {
        d.push_back(curve.delta()[i]);
        v.push_back(curve.value()[i]);
      }
    }
    curve = envelope(ErrorCurve(d, v), s.envelope_window);
  }
  const auto fit = fit_rate(curve, s.lo, s.hi);
  Table t;
  t.meta.emplace_back("column", column);
  t.columns = {"slope", "intercept", "r_squared", "used", "zeros_excluded"};
  t.rows.push_back({fit.slope, fit.intercept, fit.r_squared, static_cast<double>(fit.used),
                    static_cast<double>(fit.zeros_excluded)});
  return t;
}

Table demo_lemma(const State& s) {
  std::function<double(double)> f;
  if (s.f == "sin") {
    f = [](double x) { return 1.1 + std::sin(2.0 * std::numbers::pi * x); };
  } else if (s.f == "square") {
    f = [](double x) { return std::cos(2.0 * std::numbers::pi * x) >= 0.0 ? 3.0 : 1.0; };
  } else {
    throw ValidationError("unknown --f '" + s.f + "'; expected sin or square");
  }
  const Kernel k = parse_kernel(s.kernel);
  SweepConfig c = sweep_config(s);
  c.validate();
  Table t;
  t.meta.emplace_back("f", s.f == "sin" ? "1.1 + sin(2 pi s)" : "2 + sign(cos(2 pi s))");
  t.columns = {"delta", "raw", "upsilon"};
  for (double d : c.deltas()) {
    t.rows.push_back({d, std::pow(d, -s.r) * f(d), upsilon_r(f, s.r, d, k, s.n_trap)});
  }
  return t;
}

// Returns argv with the config file's entries appended as flags for every option
// the command line left unset. Keys may use '_' or '-'.
std::vector<std::string> merge_config(const std::vector<std::string>& args, CLI::App& app,
                                      const std::string& path) {
  CLI::App* sub = leaf(app);
  std::vector<std::string> merged = args;
  for (const auto& entry : load_config_file(path)) {
    std::string name = entry.key;
    for (char& ch : name) {
      if (ch == '_') ch = '-';
    }
    const CLI::Option* opt = sub->get_option_no_throw("--" + name);
    if (opt == nullptr || is_bookkeeping(name)) {
      throw ConfigError(path + ":" + std::to_string(entry.line) + ": unknown key '" +
                            entry.key + "' for '" + sub->get_name() + "'",
                        entry.line);
    }
    if (opt->count() > 0) continue;
    merged.push_back("--" + name);
    merged.push_back(entry.value);
  }
  return merged;
}

int parse(CLI::App& app, std::vector<std::string> args) {
  std::reverse(args.begin(), args.end());
  app.parse(args);
  return 0;
}

}  // namespace

std::vector<ConfigEntry> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  std::vector<ConfigEntry> entries;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    const std::string key = eq == std::string::npos ? "" : trim(line.substr(0, eq));
    const std::string value = eq == std::string::npos ? "" : trim(line.substr(eq + 1));
    if (key.empty() || value.empty() || key.find_first_of(" \t") != std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value', got '" +
                            line + "'",
                        lineno);
    }
    entries.push_back({key, value, lineno});
  }
  return entries;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto fresh = [](std::unique_ptr<CLI::App>& app, std::unique_ptr<State>& state) {
    app = std::make_unique<CLI::App>("Cell-resonance error in numerical homogenization",
                                     "cellres");
    state = std::make_unique<State>();
    return build_app(*app, *state);
  };
  std::unique_ptr<CLI::App> app;
  std::unique_ptr<State> state;
  Commands cmd = fresh(app, state);

  try {
    parse(*app, args);
    if (!state->config.empty()) {
      const auto merged = merge_config(args, *app, state->config);
      cmd = fresh(app, state);
      parse(*app, merged);
    }
  } catch (const CLI::ParseError& e) {
    return app->exit(e, out, err) == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    err << "cellres: " << e.what() << '\n';
    return 2;
  }

  CLI::App* sub = leaf(*app);
  // Subcommands share one State; restore per-subcommand defaults for unset options.
  for (auto [flag, slot] : {std::pair{"--delta-max", &state->delta_max}}) {
    const auto* opt = sub->get_option_no_throw(flag);
    if (opt != nullptr && opt->count() == 0) *slot = std::stod(opt->get_default_str());
  }
  if (const auto* opt = sub->get_option_no_throw("--coeff"); opt != nullptr && opt->count() == 0) {
    state->coeff = opt->get_default_str();
  }

  try {
    const State& s = *state;
    Table table;
    if (sub == cmd.kernel_build) {
      table = kernel_build(s);
    } else if (sub == cmd.kernel_verify) {
      table = kernel_verify(s);
    } else if (sub == cmd.sweep1d) {
      table = run_sweep_1d(sweep_config(s), catalogue_1d(s.coeff));
    } else if (sub == cmd.sweep2d || sub == cmd.tubular) {
      table = run_sweep_2d(sweep_config(s), catalogue_2d(s.coeff),
                           sub == cmd.tubular ? Geometry::tubular : Geometry::square);
    } else if (sub == cmd.average) {
      table = average(s);
    } else if (sub == cmd.rates) {
      table = rates(s);
    } else if (sub == cmd.demo) {
      table = demo_lemma(s);
    }
    prepend_meta(table, effective_parameters(*app));
    emit(table, s, out);
  } catch (const Error& e) {
    err << "cellres: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "cellres: unexpected failure: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace cellres::cli
