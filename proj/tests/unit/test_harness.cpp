#ifdef HITCHIN_WITH_HARNESS

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <iomanip>
#include <sys/wait.h>
#include <unistd.h>

#include "harness/cache.hpp"
#include "harness/commands.hpp"
#include "harness/config.hpp"
#include "harness/serialize.hpp"
#include "hitchin/defaults.hpp"
#include "hitchin/errors.hpp"
#include "hitchin/inversion.hpp"
#include "hitchin/sov.hpp"

using namespace hitchin;
using namespace harness;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int n = 0;
    path = fs::temp_directory_path() / ("hitchin-harness-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& s) const { return (path / s).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string list(const CVector& v) {
  std::string s;
  for (cplx z : v) s += (s.empty() ? "" : ", ") + format_complex(z);
  return s;
}

bool bitwise_equal(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(cplx) * a.size()) == 0;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("complex numbers") {
    CHECK(parse_complex("1.5") == cplx(1.5, 0));
    CHECK(parse_complex("-2j") == cplx(0, -2));
    CHECK(parse_complex("0.3-0.2j") == cplx(0.3, -0.2));
    CHECK(parse_complex(" (1e-3+2.5e+1j) ") == cplx(1e-3, 25));
    CHECK(parse_complex("-1-j") == cplx(-1, -1));
    CHECK(parse_complex("j") == cplx(0, 1));
    const cplx z(0.1 / 3.0, -std::sqrt(2.0));
    CHECK(parse_complex(format_complex(z)) == z);
    CHECK_THROWS_AS(parse_complex("1+2k"), ConfigError);
    CHECK_THROWS_AS(parse_complex(""), ConfigError);
    CHECK(parse_complex_list("1, 2j ,3-1j").size() == 3);
  }

  TEST_CASE("config parsing") {
    const auto c = parse_config(
        "[curve]\nfamily = so4\nroots = -2, -1, 0.5j, 1, 2\nhams = 1, 0, 2, 0, 1+0.5j, 0.3\n"
        "[flow]\nhamiltonian = 2\nt_max = 0.5\nsamples = 5\nmethod = ode\n"
        "[tolerances]\ntheta_eps = 1e-9\n[output]\ndir = here\n");
    CHECK(c.family == Family::SO4);
    CHECK(std::abs(c.base.P(0.5 * kI)) < 1e-13);
    CHECK(c.hams->size() == 6);
    CHECK((*c.hams)[4] == cplx(1, 0.5));
    CHECK(c.hamiltonian == 2);
    CHECK(c.method == Method::Ode);
    CHECK(c.tol.theta_eps == 1e-9);
    CHECK(c.tol.theta_budget == 40'000'000);
    CHECK(c.output_dir == "here");
    CHECK(c.times().size() == 6);
    CHECK(c.times().back() == 0.5);

    const auto d = parse_config("");
    CHECK(d.family == Family::SL2);
    CHECK(d.curve().hams() == default_hams(Family::SL2));

    CHECK_THROWS_AS(parse_config("[curve]\nfamly = sl2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[flows]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("not a line\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[flow]\nsamples = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[flow]\nsamples = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[tolerances]\nresidual = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[curve]\nhams = 1, 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[curve]\ncoefficients = 1, 2, 3, 4, 5, 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[flow]\nhamiltonian = 3\n"), ConfigError);
  }

  TEST_CASE("explicit configuration seeds the curve") {
    const SpectralCurve c = default_curve(Family::SL2);
    const auto g = random_configuration(c, 5);
    const std::string cfg = "[configuration]\nx = " + list(g.xs()) + "\nlambda = " + list(g.lambdas()) + "\ny = " +
                            list([&] {
                              CVector y(g.size());
                              for (int i = 0; i < g.size(); ++i) y[i] = g.points[i].y;
                              return y;
                            }()) + "\n";
    const auto e = parse_config(cfg);
    CHECK((e.curve().hams() - c.hams()).norm() < 1e-12);
    CHECK(hausdorff_points(e.initial(e.curve()), g) == 0.0);
    CHECK_THROWS_AS(parse_config(cfg + "[curve]\nhams = 1, 2, 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[configuration]\nx = 1, 2, 3\n"), ConfigError);
  }

  TEST_CASE("period data serialization") {
    const PeriodData pd = compute_periods(default_curve(Family::SO4));
    const PeriodData back = period_data_from_json(json::parse(to_json(pd).dump()));
    CHECK(bitwise_equal(back.tau, pd.tau));
    CHECK(bitwise_equal(back.A_mat, pd.A_mat));
    CHECK(back.cycles.a_cycles == pd.cycles.a_cycles);
    CHECK(back.cycles.fundamental.size() == pd.cycles.fundamental.size());
    const auto g = random_configuration(pd.curve, 9);
    CHECK((abel_prym(back, g) - abel_prym(pd, g)).norm() == 0.0);
    CHECK_THROWS_AS(period_data_from_json(json::object()), ConfigError);
  }

  TEST_CASE("period cache") {
    TempDir dir;
    const SpectralCurve c = default_curve(Family::SL2);
    Tolerances tol;
    const auto a = cached_periods(c, tol, dir.path.string());
    CHECK(a.status == CacheStatus::Miss);
    const auto b = cached_periods(c, tol, dir.path.string());
    CHECK(b.status == CacheStatus::Hit);
    CHECK(bitwise_equal(a.periods.tau, b.periods.tau));

    std::string text = slurp(a.path);
    text[text.size() / 2] = text[text.size() / 2] == '1' ? '2' : '1';
    std::ofstream(a.path, std::ios::trunc) << text;
    const auto r = cached_periods(c, tol, dir.path.string());
    CHECK(r.status == CacheStatus::Corrupt);
    CHECK(bitwise_equal(r.periods.tau, a.periods.tau));
    CHECK(cached_periods(c, tol, dir.path.string()).status == CacheStatus::Hit);

    Tolerances loose = tol;
    loose.quadrature = 1e-10;
    CHECK(cache_key(c, loose) != cache_key(c, tol));
    CHECK(cache_key(default_curve(Family::SO4), tol) != cache_key(c, tol));
    CHECK(cache_key(c.with_hams(2.0 * c.hams()), tol) != cache_key(c, tol));
  }

  TEST_CASE("structure reports") {
    TempDir dir;
    std::ostringstream log;
    auto cfg = ExperimentConfig::defaults(Family::SO4);
    cfg.output_dir = dir.path.string();
    const json s = cmd_structure(cfg, log);
    CHECK(s["branch_points"] == 16);
    CHECK(s["singular_points"] == 4);
    CHECK(s["genus"] == 13);
    CHECK(log.str().find("16 branch points, 4 singular points, genus 13") != std::string::npos);
    cfg = ExperimentConfig::defaults(Family::SL2);
    cfg.output_dir = dir.path.string();
    const json t = cmd_structure(cfg, log);
    CHECK(t["branch_points"] == 4);
    CHECK(t["genus"] == 5);
    CHECK(fs::exists(dir / "structure.json"));
  }

  TEST_CASE("periods report") {
    TempDir dir;
    std::ostringstream log;
    auto cfg = ExperimentConfig::defaults(Family::SL2);
    cfg.output_dir = dir / "out";
    cfg.cache_dir = dir / "cache";
    const json a = cmd_periods(cfg, log);
    CHECK(a["symmetry_error"].get<double>() <= 1e-8);
    CHECK(a["cache"] == "miss");
    CHECK(a["tolerances"]["quadrature"] == cfg.tol.quadrature);
    const json b = cmd_periods(cfg, log);
    CHECK(b["cache"] == "hit");
    CHECK(a["tau"] == b["tau"]);
  }

  TEST_CASE("trajectory command") {
    TempDir dir;
    std::ostringstream log;
    auto cfg = ExperimentConfig::defaults(Family::SL2);
    cfg.cache_dir = dir / "cache";
    cfg.output_dir = dir / "zero";
    cfg.t_max = 0.0;
    cmd_trajectory(cfg, Method::Ode, log);
    const std::string zero = slurp(dir / "zero/trajectory_ode.csv");
    CHECK(zero.rfind("# family=sl2", 0) == 0);
    CHECK(std::count(zero.begin(), zero.end(), '\n') == 2 + 3);
    const auto g0 = cfg.initial(cfg.curve());
    std::ostringstream row;
    row << std::setprecision(17) << "0,0," << g0.points[0].x.real() << ',' << g0.points[0].x.imag();
    CHECK(zero.find(row.str()) != std::string::npos);

    cfg.t_max = 0.2;
    cfg.samples = 20;
    cfg.output_dir = dir / "a";
    const json a = cmd_trajectory(cfg, Method::Both, log);
    CHECK(a["max_dist_x"].get<double>() <= 1e-4);
    CHECK(a["max_dist_points"].get<double>() <= 1e-3);
    CHECK(a["tolerances"]["ode_rel_tol"] == cfg.tol.ode_rel_tol);
    const std::string table = slurp(dir / "a/comparison.csv");
    CHECK(table.rfind("# family=sl2", 0) == 0);
    CHECK(table.find("dist_x") != std::string::npos);

    cfg.output_dir = dir / "b";
    cmd_trajectory(cfg, Method::Both, log);
    for (const char* f : {"comparison.csv", "trajectory_ode.csv", "trajectory_theta.csv", "trajectory.json"})
      CHECK(slurp(dir / (std::string("a/") + f)) == slurp(dir / (std::string("b/") + f)));
  }

  TEST_CASE("theta divisor hits become warning rows") {
    TempDir dir;
    const SpectralCurve c = default_curve(Family::SL2);
    const PeriodData pd = compute_periods(c);
    const ThetaContext ctx(pd.tau);
    const PrymInverter inv(pd, ctx);
    const CalibrationData cal0 = inv.calibrate(random_configuration(c, 3));
    // Start where phi(t) meets the theta divisor at infinity at t = 0.02.
    CVector w(3);
    w << cplx(0.1, 0.05), cplx(-0.2, 0.1), cplx(0.3, -0.05);
    for (int it = 0; it < 50; ++it) {
      const Jet j = ctx.jet(w, 1);
      w[0] -= j[0] / j[1];
    }
    const CVector nu = action_variables(pd).frequencies.col(0);
    CalibrationData cal = cal0;
    cal.phi0 = inv.infinity().images[0] - cal.K.K - w - nu * 0.02;
    PhaseConfiguration start;
    // Lifts on the divisor of theta(A(P) - phi0 - K).
    auto on_divisor = [&](const SurfacePoint& p) {
      PhaseConfiguration one;
      one.points.push_back(p);
      return divisor_residual(pd, ctx, one, cal.phi0, cal.K.K);
    };
    for (cplx v : power_sums_to_x(inv.sigma(cal, cal.phi0))) {
      const auto lifts = lift_x(c, v, 0.0);
      start.points.push_back(*std::min_element(lifts.begin(), lifts.end(), [&](const auto& a, const auto& b) {
        return on_divisor(a) < on_divisor(b);
      }));
    }
    REQUIRE(divisor_residual(pd, ctx, start, cal.phi0, cal.K.K) < 1e-8);
    CVector y(3);
    for (int i = 0; i < 3; ++i) y[i] = start.points[i].y;
    CVector lam = start.lambdas();

    std::ofstream(dir / "hit.ini") << "[configuration]\nx = " << list(start.xs()) << "\ny = " << list(y)
                                   << "\nlambda = " << list(lam) << "\n[flow]\nt_max = 0.03\nsamples = 3\n"
                                   << "[output]\ndir = " << (dir / "out") << "\ncache = \n";
    const auto cfg = load_config(dir / "hit.ini");
    std::ostringstream log;
    const json j = cmd_trajectory(cfg, Method::Theta, log);
    CHECK(!j["warnings"].empty());
    CHECK(j["samples"] == 4);
    CHECK(log.str().find("warning:") != std::string::npos);
    const std::string table = slurp(dir / "out/trajectory_theta.csv");
    CHECK(table.find("# warning: sample 2") != std::string::npos);
    CHECK(table.find("\n0.02,") == std::string::npos);
  }

  TEST_CASE("exit codes") {
    CHECK(exit_code(ConfigError("x")) == 2);
    CHECK(exit_code(NearThetaDivisor("x")) == 3);
    CHECK(exit_code(DegenerateCurve("x")) == 4);
    CHECK(exit_code(std::runtime_error("x")) == 3);
    TempDir dir;
    std::ofstream(dir / "bad.ini") << "[curve]\nfamily = sl3\n";
    std::ofstream(dir / "degenerate.ini") << "[curve]\nhams = 1, 0, 0\n[output]\ndir = " << (dir / "o") << "\n";
    auto run = [&](const std::string& args) {
      const int st = std::system((std::string(HITCHIN_CLI) + " " + args + " > /dev/null 2>&1").c_str());
      return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    };
    CHECK(run("--config " + dir / "bad.ini" + " structure") == 2);
    CHECK(run("--config " + dir / "missing.ini" + " structure") == 2);
    CHECK(run("--config " + dir / "degenerate.ini" + " structure") == 4);
    CHECK(run("-o " + dir / "o" + " structure") == 0);
  }
}

#endif
