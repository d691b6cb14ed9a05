#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "cellres/csv.hpp"
#include "cellres/error.hpp"
#include "cellres/resonance1d.hpp"
#include "cli.hpp"

using namespace cellres;

namespace {

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.status = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

Table parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

std::string meta(const Table& t, const std::string& key) {
  for (const auto& [k, v] : t.meta) {
    if (k == key) return v;
  }
  return "<missing>";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("kernel verify prints residuals under 1e-10 for the vanishing moments") {
  const auto r = run({"kernel", "verify", "--kernel", "poly:p=2,q=3", "--rmax", "4"});
  REQUIRE(r.status == 0);
  const auto t = parse(r.out);
  CHECK(t.columns == std::vector<std::string>{"r", "moment", "target", "residual"});
  REQUIRE(t.rows.size() == 5);
  for (const auto& row : t.rows) {
    if (row[0] <= 2) CHECK(row[3] <= 1e-10);
    else CHECK(std::isnan(row[2]));
  }
  CHECK(meta(t, "--kernel") == "poly:p=2,q=3");
}

TEST_CASE("kernel build prints the coefficients") {
  const auto r = run({"kernel", "build", "--kernel", "poly:p=0,q=0"});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("-6") != std::string::npos);
}

TEST_CASE("sweep1d matches direct evaluation") {
  const auto r = run({"sweep1d", "--coeff", "a1", "--delta-max", "100", "--ntrap", "16"});
  REQUIRE(r.status == 0);
  const auto t = parse(r.out);
  const auto delta = t.column("delta");
  const auto rho = t.column("rho");
  const auto err = t.column("error");
  CHECK(delta.size() == 1981);
  const auto a1 = catalogue_1d("a1");
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (i) CHECK(delta[i] > delta[i - 1]);
    CHECK(std::abs(err[i]) <= 1.0 / delta[i]);
    CHECK(rho[i] == rho_eps(a1, delta[i]).rho);
  }
  CHECK(meta(t, "--delta-step") == "0.05");
  CHECK(meta(t, "--ntrap") == "16");
}

TEST_CASE("identical arguments give identical bytes") {
  const std::vector<std::string> args{"sweep2d", "--coeff", "case2", "--delta-max", "1.5",
                                      "--delta-step", "0.1", "--nbase", "12"};
  auto with_workers = args;
  with_workers.insert(with_workers.end(), {"--workers", "4"});
  const auto a = run(args);
  REQUIRE(a.status == 0);
  CHECK(run(args).out == a.out);
  CHECK(run(with_workers).out == a.out);
}

TEST_CASE("emitted curves reload through average and rates") {
  const auto sweep = run({"sweep1d", "--coeff", "a1", "--delta-max", "40", "--ntrap", "16",
                          "--output", "cli_curve.csv"});
  REQUIRE(sweep.status == 0);
  const auto avg = run({"average", "--input", "cli_curve.csv", "--kernel", "flat", "--delta", "20",
                        "--column", "rho"});
  REQUIRE(avg.status == 0);
  const auto t = parse(avg.out);
  REQUIRE(t.rows.size() == 1);
  // 0.05 spacing is 20 panels per unit: the same nodes as a direct 20-panel rule.
  CHECK(t.rows[0][1] ==
        doctest::Approx(smoothed_average(catalogue_1d("a1"), 20.0, flat_kernel(), 20)).epsilon(1e-12));
  const auto rates = run({"rates", "--input", "cli_curve.csv", "--lo", "10", "--hi", "40"});
  REQUIRE(rates.status == 0);
  const auto fit = parse(rates.out);
  CHECK(fit.column("slope")[0] < -0.5);
}

TEST_CASE("demo-lemma emits raw and averaged columns") {
  const auto r = run({"demo-lemma", "--f", "sin", "--r", "2", "--kernel", "poly:p=1,q=1",
                      "--delta-max", "3", "--ntrap", "64"});
  REQUIRE(r.status == 0);
  const auto t = parse(r.out);
  CHECK(t.columns == std::vector<std::string>{"delta", "raw", "upsilon"});
  CHECK(t.rows.size() == 41);
}

TEST_CASE("config files: defaults, precedence and errors") {
  write_file("cli_empty.cfg", "");
  const auto plain = run({"sweep1d", "--delta-max", "2", "--ntrap", "16"});
  const auto empty = run({"sweep1d", "--config", "cli_empty.cfg", "--delta-max", "2", "--ntrap", "16"});
  REQUIRE(empty.status == 0);
  CHECK(empty.out == plain.out);

  write_file("cli_step.cfg", "# comment\ndelta_step = 0.1\n\nntrap = 16\n");
  const auto flag = run({"sweep1d", "--config", "cli_step.cfg", "--delta-step", "0.05", "--delta-max", "2"});
  REQUIRE(flag.status == 0);
  const auto t = parse(flag.out);
  CHECK(meta(t, "--delta-step") == "0.05");
  CHECK(meta(t, "--ntrap") == "16");
  CHECK(t.rows.size() == 21);

  write_file("cli_bad.cfg", "delta_step 0.1\n");
  const auto bad = run({"sweep1d", "--config", "cli_bad.cfg"});
  CHECK(bad.status != 0);
  CHECK(bad.err.find("cli_bad.cfg:1:") != std::string::npos);
  CHECK_THROWS_AS(cli::load_config_file("cli_bad.cfg"), ConfigError);
  try {
    cli::load_config_file("cli_bad.cfg");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 1);
  }

  write_file("cli_unknown.cfg", "delta_step = 0.1\nbogus = 1\n");
  const auto unknown = run({"sweep1d", "--config", "cli_unknown.cfg"});
  CHECK(unknown.status != 0);
  CHECK(unknown.err.find("bogus") != std::string::npos);
}

TEST_CASE("usage and library errors map to distinct exit codes") {
  CHECK(run({"frobnicate"}).status == 2);
  CHECK(run({"sweep1d", "--no-such-flag", "1"}).status == 2);
  CHECK(run({}).status == 2);
  const auto lib = run({"sweep1d", "--coeff", "a7"});
  CHECK(lib.status == 1);
  CHECK(lib.err.find("a1, a2, a3") != std::string::npos);
  // One-line diagnostic.
  CHECK(lib.err.find('\n') == lib.err.size() - 1);
  CHECK(run({"kernel", "verify", "--kernel", "poly:p=9,q=0"}).status == 1);
  CHECK(run({"average", "--input", "missing.csv", "--delta", "2"}).status == 1);
}
