#include "harness/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "harness/cache.hpp"
#include "hitchin/errors.hpp"
#include "hitchin/inversion.hpp"
#include "hitchin/sov.hpp"

namespace harness {

using namespace hitchin;
namespace fs = std::filesystem;

int exit_code(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->error_class()) {
      case ErrorClass::Config: return 2;
      case ErrorClass::Numerical: return 3;
      case ErrorClass::Geometry: return 4;
    }
  }
  return 3;
}

json tolerance_json(const ExperimentConfig& cfg) {
  const auto& t = cfg.tol;
  return json{{"quadrature", t.quadrature},   {"theta_eps", t.theta_eps},     {"theta_budget", t.theta_budget},
              {"residual", t.residual},       {"ode_rel_tol", t.ode_rel_tol}, {"calibration_seeds", t.calibration_seeds}};
}

std::string tolerance_comment(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# family=" << family_name(cfg.family) << " hamiltonian=" << cfg.hamiltonian << " seed=" << cfg.seed;
  const json t = tolerance_json(cfg);
  for (const auto& [k, v] : t.items()) os << ' ' << k << '=' << v.dump();
  return os.str();
}

namespace {

void write_file(const ExperimentConfig& cfg, const std::string& name, const std::string& body) {
  fs::create_directories(cfg.output_dir);
  std::ofstream os(fs::path(cfg.output_dir) / name, std::ios::trunc);
  if (!os) throw ConfigError("cannot write " + (fs::path(cfg.output_dir) / name).string());
  os << body;
}

void write_json(const ExperimentConfig& cfg, const std::string& name, const json& j) {
  write_file(cfg, name, j.dump(2) + "\n");
}

std::string csv(const ExperimentConfig& cfg, const TrajectoryRecord& rec) {
  std::ostringstream os;
  os << tolerance_comment(cfg) << '\n';
  for (const auto& w : rec.warnings) os << "# warning: " << w << '\n';
  write_csv(os, rec);
  return os.str();
}

json points_json(const std::vector<SurfacePoint>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(to_json(p));
  return a;
}

}  // namespace

json cmd_structure(const ExperimentConfig& cfg, std::ostream& log) {
  const SpectralCurve c = cfg.curve();
  const auto bp = branch_points(c);
  const auto sp = singular_points(c);
  const int genus = genus_check(c);
  const int over_inf = static_cast<int>(c.infinity_labels().size());
  const int generic = static_cast<int>(lift_x(c, cfg.base.roots()[0] + cplx(0.37, 0.21), 0.0).size());
  json j{{"family", std::string(family_name(c.family()))},
         {"branch_points", bp.size()},
         {"singular_points", sp.size()},
         {"genus", genus},
         {"points_over_infinity", over_inf},
         {"sheets", generic},
         {"hams", to_json(c.hams())},
         {"branch", points_json(bp)},
         {"singular", points_json(sp)}};
  log << bp.size() << " branch points";
  if (c.family() == Family::SO4) log << ", " << sp.size() << " singular points";
  log << ", genus " << genus << "\n";
  log << over_inf << " points over infinity, " << generic << " sheets\n";
  write_json(cfg, "structure.json", j);
  return j;
}

json cmd_periods(const ExperimentConfig& cfg, std::ostream& log) {
  const SpectralCurve c = cfg.curve();
  const auto cp = cached_periods(c, cfg.tol, cfg.cache_dir);
  const PeriodData& pd = cp.periods;
  json j{{"family", std::string(family_name(c.family()))},
         {"genus_prym", pd.h()},
         {"cache", cache_status_name(cp.status)},
         {"cache_file", cp.path},
         {"symmetry_error", pd.symmetry_error},
         {"min_im_eig", pd.min_im_eig},
         {"polarization", pd.divisors},
         {"tau", to_json(pd.tau)},
         {"tolerances", tolerance_json(cfg)}};
  log << std::setprecision(3) << "cache " << cache_status_name(cp.status) << "\n"
      << "tau " << pd.h() << "x" << pd.h() << ", symmetry error " << pd.symmetry_error
      << ", min eig Im tau " << pd.min_im_eig << "\n";
  write_json(cfg, "periods.json", j);
  return j;
}

json cmd_trajectory(const ExperimentConfig& cfg, Method method, std::ostream& log) {
  const SpectralCurve c = cfg.curve();
  const PhaseConfiguration g0 = cfg.initial(c);
  const int k = cfg.hamiltonian;
  std::vector<double> times = cfg.times();
  json j{{"family", std::string(family_name(c.family()))},
         {"hamiltonian", k},
         {"method", method_name(method)},
         {"samples", times.size()},
         {"tolerances", tolerance_json(cfg)}};

  TrajectoryRecord th;
  if (method != Method::Ode) {
    const auto cp = cached_periods(c, cfg.tol, cfg.cache_dir);
    ThetaOptions to;
    to.target_eps = cfg.tol.theta_eps;
    to.point_budget = cfg.tol.theta_budget;
    const ThetaContext ctx(cp.periods.tau, to);
    const PrymInverter inv(cp.periods, ctx);
    CalibrationOptions co;
    co.tol = cfg.tol.residual;
    co.max_seeds = cfg.tol.calibration_seeds;
    const CalibrationData cal = inv.calibrate(g0, co);
    ThetaTrajectoryOptions topt;
    topt.reconstruct.residual_tol = cfg.tol.residual;
    th = theta_trajectory(inv, cal, g0, k, times, topt);
    times = th.times;
    write_file(cfg, "trajectory_theta.csv", csv(cfg, th));
    j["calibration"] = {{"fit_residual", cal.K.fit_residual}, {"seed", cal.K.seed}, {"K", to_json(cal.K.K)}};
    j["warnings"] = th.warnings;
    for (const auto& w : th.warnings) log << "warning: " << w << "\n";
  }
  TrajectoryRecord ode;
  if (method != Method::Theta) {
    ode = ode_flow(c, g0, k, times, cfg.tol.ode_rel_tol);
    write_file(cfg, "trajectory_ode.csv", csv(cfg, ode));
  }
  auto max_of = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
  if (method != Method::Theta)
    j["ode"] = {{"ham_residual", max_of(ode.ham_residual)}, {"curve_residual", max_of(ode.curve_residual)}};
  if (method != Method::Ode)
    j["theta"] = {{"ham_residual", max_of(th.ham_residual)}, {"curve_residual", max_of(th.curve_residual)}};

  if (method == Method::Both) {
    const std::vector<double> requested = cfg.times();
    std::ostringstream os;
    os << tolerance_comment(cfg) << '\n'
       << "t,requested_t,dist_x,dist_points,ham_residual_ode,ham_residual_theta,note\n"
       << std::setprecision(17);
    double dx = 0.0, dp = 0.0;
    for (std::size_t s = 0; s < times.size(); ++s) {
      const double ex = hausdorff(th.configs[s].xs(), ode.configs[s].xs());
      const double ep = hausdorff_points(th.configs[s], ode.configs[s]);
      dx = std::max(dx, ex);
      dp = std::max(dp, ep);
      os << times[s] << ',' << requested[s] << ',' << ex << ',' << ep << ',' << ode.ham_residual[s] << ','
         << th.ham_residual[s] << ',' << (times[s] != requested[s] ? "resampled" : "") << '\n';
    }
    write_file(cfg, "comparison.csv", os.str());
    j["max_dist_x"] = dx;
    j["max_dist_points"] = dp;
    log << std::setprecision(3) << "max multiset distance " << dx << " in x, " << dp << " in (x, y, lambda)\n";
  }
  log << times.size() << " samples written to " << cfg.output_dir << "\n";
  write_json(cfg, "trajectory.json", j);
  return j;
}

}  // namespace harness
