#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <pdcli/experiment.hpp>
#include <pdcli/output.hpp>
#include <pdcli/verify.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace pdcli;

namespace {

struct Proc {
  int code = -1;
  std::string out;
};

Proc run_cli(const std::string& args) {
  const std::string cmd = std::string(PDACCEL_CLI_PATH) + " " + args + " 2>&1";
  Proc p;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) p.out.append(buf.data(), n);
  const int status = pclose(pipe);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return p;
}

std::string csv_of(const ExperimentConfig& cfg) {
  std::ostringstream s;
  write_csv(s, run_experiment(cfg).table);
  return s.str();
}

std::map<std::string, std::string> kv_line(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) != 0) continue;
    std::map<std::string, std::string> out;
    std::istringstream words(line);
    std::string w;
    while (words >> w) {
      const auto eq = w.find('=');
      if (eq != std::string::npos) out[w.substr(0, eq)] = w.substr(eq + 1);
    }
    return out;
  }
  return {};
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t c = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++c;
  return c;
}

ExperimentConfig toy_cfg(SolverChoice s, ParamMode m, int iters) {
  ExperimentConfig c;
  c.solver = s;
  c.mode = m;
  c.iters = iters;
  return c;
}

}  // namespace

TEST_CASE("parsers") {
  CHECK(parse_solver("opdhg-dual") == SolverChoice::OpdhgDual);
  CHECK(parse_problem("denoise") == ProblemKind::Denoise);
  CHECK(parse_mode("manual") == ParamMode::Manual);
  CHECK_THROWS_AS(parse_solver("sgd"), ConfigError);
  CHECK_THROWS_AS(parse_mode("auto"), ConfigError);
  CHECK(std::string(solver_name(SolverChoice::AdmmAccel)) == "admm-accel");
}

TEST_CASE("zero iterations give a header-only table") {
  const std::string csv = csv_of(toy_cfg(SolverChoice::Admm, ParamMode::OracleGlobal, 0));
  CHECK(csv ==
        "n,objective_error,solution_error,dual_error,feasibility_error,theory_global,"
        "theory_solution\n");
}

TEST_CASE("CSV is deterministic and round-trips at 17 digits") {
  const ExperimentConfig cfg = toy_cfg(SolverChoice::AdmmAccel, ParamMode::OracleGlobal, 60);
  const std::string a = csv_of(cfg);
  CHECK(a == csv_of(cfg));
  CHECK(a.find('\r') == std::string::npos);
  const ExperimentResult r = run_experiment(cfg);
  for (const auto& row : r.table.rows) {
    for (double v : row) {
      if (std::isnan(v)) continue;
      CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
    }
  }
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(std::nan("")) == "");
}

TEST_CASE("opdhg and FISTA have blank feasibility cells") {
  std::istringstream in(csv_of(toy_cfg(SolverChoice::Opdhg, ParamMode::OracleGlobal, 3)));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(row.find(",,") != std::string::npos);
}

TEST_CASE("ADMM overlay bounds the trace") {
  for (SolverChoice s : {SolverChoice::AdmmAccel, SolverChoice::Admm}) {
    const ParamMode mode =
        s == SolverChoice::Admm ? ParamMode::OracleGlobal : ParamMode::OracleSolution;
    const ExperimentResult r = run_experiment(toy_cfg(s, mode, 500));
    REQUIRE(r.omega_tilde.has_value());
    // columns: n, objective, solution, dual, feasibility, theory_global, theory_solution
    const double floor = 1e-20 * r.table.rows.front()[6];
    for (const auto& row : r.table.rows) {
      const double bound = std::max(row[6], floor) * (1 + 1e-12);
      CHECK(row[3] <= bound);
      if (row[0] >= 1) CHECK(row[2] <= bound);
    }
  }
}

TEST_CASE("oPDHG overlay bounds the solution error at every n") {
  for (ParamMode mode : {ParamMode::OracleGlobal, ParamMode::OracleSolution}) {
    const ExperimentResult r = run_experiment(toy_cfg(SolverChoice::Opdhg, mode, 500));
    const double floor = 1e-20 * r.table.rows.front()[6];
    for (const auto& row : r.table.rows) CHECK(row[2] <= std::max(row[6], floor) * (1 + 1e-12));
  }
}

TEST_CASE("FISTA overlay uses omega = 0.9 on the toy") {
  const ExperimentResult r =
      run_experiment(toy_cfg(SolverChoice::Fista, ParamMode::OracleGlobal, 50));
  REQUIRE(r.omega.has_value());
  CHECK(*r.omega == 0.9);
  const auto& rows = r.table.rows;
  CHECK(rows[5][5] / rows[4][5] == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("manual parameters") {
  ExperimentConfig cfg = toy_cfg(SolverChoice::Opdhg, ParamMode::Manual, 10);
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  cfg.tau = 10.0;
  cfg.sigma = 10.0;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  cfg.allow_infeasible = true;
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.table.rows.size() == 11);
  CHECK_FALSE(r.omega_tilde.has_value());
  ExperimentConfig f = toy_cfg(SolverChoice::Fista, ParamMode::OracleSolution, 10);
  CHECK_THROWS_AS(run_experiment(f), ConfigError);
}

TEST_CASE("SVG is well formed with one polyline per column") {
  const ExperimentResult r =
      run_experiment(toy_cfg(SolverChoice::AdmmAccel, ParamMode::OracleGlobal, 100));
  std::ostringstream s;
  SvgOptions opts;
  opts.title = "a < b & c";
  opts.columns = {"solution_error", "theory_solution", "dual_error"};
  write_svg(s, r.table, opts);
  const std::string svg = s.str();
  CHECK(count(svg, "<polyline") == 3);
  CHECK(count(svg, "data-column=\"dual_error\"") == 1);
  CHECK(svg.find("log10") != std::string::npos);
  CHECK(svg.find("viewBox=\"0 0 800 600\"") != std::string::npos);
  CHECK(svg.find("a &lt; b &amp; c") != std::string::npos);
  // Every element is self-closed or matched by a closing tag.
  std::vector<std::string> stack;
  for (std::size_t p = svg.find('<'); p != std::string::npos; p = svg.find('<', p + 1)) {
    const std::size_t e = svg.find('>', p);
    REQUIRE(e != std::string::npos);
    const std::string tag = svg.substr(p + 1, e - p - 1);
    if (tag[0] == '?') continue;
    if (tag[0] == '/') {
      REQUIRE_FALSE(stack.empty());
      CHECK(stack.back() == tag.substr(1));
      stack.pop_back();
    } else if (tag.back() != '/') {
      stack.push_back(tag.substr(0, tag.find(' ')));
    }
  }
  CHECK(stack.empty());
  opts.columns = {"nope"};
  std::ostringstream s2;
  CHECK_THROWS_AS(write_svg(s2, r.table, opts), std::invalid_argument);
}

TEST_CASE("verify check list") {
  CHECK(check_names().size() == 9);
  VerifyOptions quick;
  quick.quick = true;
  for (const CheckResult& c : run_checks(quick)) CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);
  VerifyOptions fault = quick;
  fault.inject_fault = "oracle-identities";
  bool named = false;
  for (const CheckResult& c : run_checks(fault))
    if (c.name == "oracle-identities") named = !c.passed;
  CHECK(named);
}

TEST_CASE("params subcommand values") {
  const Proc toy = run_cli("params --problem toy --m 0.1 --M 10");
  REQUIRE(toy.code == 0);
  const auto admm = kv_line(toy.out, "oracle=admm_optimal ");
  CHECK(std::stod(admm.at("tau")) == doctest::Approx(1.421338).epsilon(1e-6));
  const auto accel = kv_line(toy.out, "oracle=admm_accel_optimal ");
  const double tau = std::stod(accel.at("tau"));
  CHECK(tau == doctest::Approx((std::sqrt(1 + 4 * 99.0) + 1) / (2 * 9.9)).epsilon(1e-12));
  CHECK(std::stod(accel.at("tau_prime")) == doctest::Approx(tau - 1 / 9.9).epsilon(1e-12));
  CHECK(std::stod(kv_line(toy.out, "kappa=").at("kappa")) == doctest::Approx(99.0));

  const Proc den = run_cli("params --problem denoise --mu 10");
  REQUIRE(den.code == 0);
  const auto d = kv_line(den.out, "oracle=admm_accel_optimal ");
  CHECK(std::stod(d.at("tau")) == doctest::Approx(1.524695).epsilon(1e-6));
  CHECK(std::stod(d.at("tau_prime")) == doctest::Approx(0.524695).epsilon(1e-6));

  const Proc sweep = run_cli("params --kappa-sweep 1,10,100,1000");
  REQUIRE(sweep.code == 0);
  CHECK(count(sweep.out, "kappa=") == 4);
  const auto k100 = kv_line(sweep.out, "kappa=100 ");
  CHECK(std::stod(k100.at("fista")) == doctest::Approx(0.900496).epsilon(1e-5));
}

TEST_CASE("exit codes") {
  CHECK(run_cli("params --gamma 0 --delta 1").code == 2);
  CHECK(run_cli("run --solver nope --iters 1").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("run --solver opdhg --mode manual --tau 10 --sigma 10 --iters 2").code == 2);
  CHECK(run_cli("run --solver opdhg --mode manual --tau 10 --sigma 10 --iters 2 "
                "--allow-infeasible")
            .code == 0);
  CHECK(run_cli("run --problem denoise --image /nonexistent.ppm --iters 2").code == 1);
  const Proc ok = run_cli("verify --quick");
  CHECK(ok.code == 0);
  const Proc bad = run_cli("verify --quick --inject-fault rate-table");
  CHECK(bad.code == 1);
  CHECK(bad.out.find("FAIL rate-table") != std::string::npos);
}
