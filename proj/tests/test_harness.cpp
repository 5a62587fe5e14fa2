#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fsi/config.hpp"
#include "fsi/harness.hpp"

using namespace fsi;

namespace {

std::filesystem::path fresh_dir(const char* stem) {
  auto dir = std::filesystem::temp_directory_path() /
             (std::string(stem) + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int run_cli(std::vector<std::string> args) {
  std::vector<char*> argv;
  args.insert(args.begin(), "fsi");
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("fit_rate recovers exact log-linear slopes") {
  CHECK(fit_rate({{2e-3, 4e-2}, {1e-3, 2e-2}, {5e-4, 1e-2}}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // Errors scaling as sqrt(step).
  CHECK(fit_rate({{1e-2, 1e-1}, {2.5e-3, 5e-2}, {6.25e-4, 2.5e-2}}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit_rate({{1e-3, 1e-2}, {5e-4, 5e-3}, {2.5e-4, 2.5e-3}}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // Slope depends only on error ratios, not on their absolute size.
  CHECK(fit_rate({{1e-3, 7e-2}, {5e-4, 3.5e-2}, {2.5e-4, 1.75e-2}}) ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(fit_rate({{1e-3, 1e-2}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate({{1e-3, 0.0}, {5e-4, 1e-3}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate({{1e-3, 1e-2}, {1e-3, 2e-2}}), std::invalid_argument);
}

TEST_CASE("spatial and relative norms agree with dense arithmetic") {
  const SparseMatrix M = SparseMatrix::from_triplets(
      2, 2, {{0, 0, 2.0}, {1, 1, 0.5}});
  DenseVector x(2), y(2);
  x << 1.0, 2.0;
  y << 1.0, 4.0;
  CHECK(spatial_norm(M, x) == doctest::Approx(std::sqrt(4.0)).epsilon(1e-14));
  // ||x - y||_M = sqrt(0.5 * 4) = sqrt(2); ||y||_M = sqrt(2 + 8).
  CHECK(relative_error(x, y, M) ==
        doctest::Approx(std::sqrt(2.0 / 10.0)).epsilon(1e-13));
  CHECK(relative_error(y, y, M) == 0.0);
  CHECK_THROWS_AS(relative_error(x, DenseVector::Zero(2), M), std::runtime_error);
}

TEST_CASE("time-discrete norms implement sqrt(dt sum) and max") {
  const std::vector<double> s = {3.0, -4.0};
  CHECK(time_discrete_norm(s, 0.5, TimeNormKind::L2) ==
        doctest::Approx(std::sqrt(0.5 * 25.0)).epsilon(1e-14));
  CHECK(time_discrete_norm(s, 0.5, TimeNormKind::Max) == 4.0);

  const SparseMatrix I = SparseMatrix::identity(2);
  DenseVector a(2), b(2);
  a << 1.0, 0.0;
  b << 0.0, 2.0;
  CHECK(time_discrete_norm({a, b}, 0.25, TimeNormKind::L2, I) ==
        doctest::Approx(std::sqrt(0.25 * (1.0 + 4.0))).epsilon(1e-14));
  CHECK(time_discrete_norm({a, b}, 0.25, TimeNormKind::Max, I) == 2.0);
}

TEST_CASE("backward differences of sin are first-order accurate") {
  // || d_t phi - phi' ||_{l2(0,T)} must halve (within 10%) when dt halves.
  auto consistency_error = [](double dt) {
    const double T = 1.0;
    const int n = static_cast<int>(std::lround(T / dt));
    std::vector<double> defect(n);
    for (int k = 1; k <= n; ++k) {
      const double t = k * dt;
      defect[k - 1] = (std::sin(t) - std::sin(t - dt)) / dt - std::cos(t);
    }
    return time_discrete_norm(defect, dt, TimeNormKind::L2);
  };
  const double e1 = consistency_error(1e-2);
  const double e2 = consistency_error(5e-3);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("study specs are validated before any run starts") {
  StudySpec spec;
  spec.base.nx = 8;
  spec.base.ny = 4;
  spec.base.T = 4e-3;
  spec.dts = {};
  CHECK_THROWS_AS(run_time_convergence(spec), std::invalid_argument);
  spec.dts = {1e-3};
  spec.dt_ref = 1e-3;  // not strictly smaller than the candidates
  CHECK_THROWS_AS(run_time_convergence(spec), std::invalid_argument);
  StudySpec thick;
  thick.nx_list = {};
  CHECK_THROWS_AS(run_thick_scaling(thick), std::invalid_argument);
}

TEST_CASE("rate report CSV round-trips its schema") {
  RateReport report;
  RateSeries s;
  s.case_name = "beta=1";
  s.norm = "velocity_L2";
  s.points = {{1e-3, 2e-2}, {5e-4, 1e-2}};
  s.slope = 1.0;
  report.series.push_back(s);

  std::ostringstream os;
  write_rates_csv(os, report);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "case,norm,step,error,slope");
  std::getline(is, line);
  CHECK(line.rfind("beta=1,velocity_L2,", 0) == 0);
  CHECK(report.find("beta=1", "velocity_L2") != nullptr);
  CHECK(report.find("beta=1", "displacement_S") == nullptr);
}

TEST_CASE("log-log figure writer emits plottable SVG") {
  svg::Series s;
  s.label = "demo";
  s.points = {{1e-3, 1e-2}, {5e-4, 5e-3}, {2.5e-4, 2.5e-3}};
  std::ostringstream os;
  svg::write_loglog(os, "demo plot", "step", "error", {s});
  const std::string text = os.str();
  CHECK(text.find("<svg") != std::string::npos);
  CHECK(text.find("polyline") != std::string::npos);
  CHECK(text.find("demo") != std::string::npos);

  svg::Series bad;
  bad.label = "bad";
  bad.points = {{1e-3, -1.0}};
  std::ostringstream dump;
  CHECK_THROWS_AS(svg::write_loglog(dump, "t", "x", "y", {bad}),
                  std::invalid_argument);
  CHECK_THROWS_AS(svg::write_loglog(dump, "t", "x", "y", {}),
                  std::invalid_argument);
}

TEST_CASE("config parser fails closed and derives wall coefficients") {
  const RunConfig rc = parse_config_text(R"({
    "scheme": "monolithic_thin",
    "beta": 0.5,
    "dt": 2e-4,
    "T": 4e-3,
    "nx": 16,
    "physics.mu": 0.04,
    "dt_list": [4e-4, 2e-4],
    "output_dir": "elsewhere"
  })");
  CHECK(rc.scheme.scheme == SchemeKind::MonolithicThin);
  CHECK(rc.scheme.beta == 0.5);
  CHECK(rc.scheme.nx == 16);
  CHECK(rc.phys.mu == 0.04);
  CHECK(rc.dt_list == std::vector<double>{4e-4, 2e-4});
  CHECK(rc.output_dir == "elsewhere");
  // C0, C1 derived from E, sigma, eps, R since neither was given.
  CHECK(rc.phys.C0 == doctest::Approx(4.0e5));
  CHECK(rc.phys.C1 == doctest::Approx(2.5e4));

  CHECK_THROWS_WITH_AS(parse_config_text(R"({"dx": 1.0})"),
                       doctest::Contains("dx"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"dt": "soon"})"),
                       doctest::Contains("dt"), std::runtime_error);
  CHECK_THROWS_AS(parse_config_text(R"({"scheme": "imex"})"), std::runtime_error);
  CHECK_THROWS_AS(parse_config_text("not json"), std::runtime_error);
  // Setting one membrane coefficient without the other is a config error.
  CHECK_THROWS_AS(parse_config_text(R"({"physics.C0": 1.0})"), std::runtime_error);
  const RunConfig both =
      parse_config_text(R"({"physics.C0": 7.0, "physics.C1": 8.0})");
  CHECK(both.phys.C0 == 7.0);
  CHECK(both.phys.C1 == 8.0);
}

TEST_CASE("command line drives a full run and writes the documented files") {
  const auto dir = fresh_dir("fsi_cli_");
  const auto cfg_path = dir / "run.json";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({"scheme": "split_thin", "nx": 8, "ny": 4,
               "dt": 1e-3, "T": 4e-3, "write_snapshots": true,
               "write_figures": false})";
  }
  const auto out = dir / "out";
  CHECK(run_cli({"run", "--config", cfg_path.string(), "--output",
                 out.string()}) == 0);

  std::ifstream ledger(out / "ledger.csv");
  REQUIRE(ledger.good());
  std::string header;
  std::getline(ledger, header);
  CHECK(header ==
        "step,t,E_f,E_v,E_s,D_visc,K_tilde,K_split,T_lambda,W_in,balance_residual");
  CHECK(std::filesystem::exists(out / "snapshot_final.txt"));
  CHECK(std::filesystem::exists(out / "mesh_fluid.txt"));

  // Identical reruns produce byte-identical ledgers.
  const auto out2 = dir / "out2";
  CHECK(run_cli({"run", "--config", cfg_path.string(), "--output",
                 out2.string()}) == 0);
  std::ifstream l1(out / "ledger.csv"), l2(out2 / "ledger.csv");
  std::stringstream s1, s2;
  s1 << l1.rdbuf();
  s2 << l2.rdbuf();
  CHECK(s1.str() == s2.str());

  CHECK(run_cli({"run", "--config", (dir / "absent.json").string(),
                 "--output", out.string()}) != 0);
  CHECK(run_cli({"run", "--definitely-not-a-flag"}) != 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("built-in self checks pass") {
  CHECK(run_cli({"--seed-check"}) == 0);
}
