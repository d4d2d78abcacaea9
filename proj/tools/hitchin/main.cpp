#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "harness/acceptance.hpp"
#include "harness/commands.hpp"
#include "hitchin/errors.hpp"

namespace {

harness::ExperimentConfig load(const std::string& path, const std::string& family, const std::string& cache) {
  harness::ExperimentConfig cfg;
  if (path.empty())
    cfg = harness::ExperimentConfig::defaults(family == "so4" ? hitchin::Family::SO4 : hitchin::Family::SL2);
  else
    cfg = harness::load_config(path);
  if (!cache.empty()) cfg.cache_dir = cache == "none" ? "" : cache;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separated-variable flows of SL2 and SO4 Hitchin systems over a genus-2 curve"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config, family = "sl2", cache, method, output;
  int verbosity = 1;
  app.add_option("-c,--config", config, "experiment config (key = value with [sections])");
  app.add_option("--family", family, "family used without a config")->check(CLI::IsMember({"sl2", "so4"}));
  app.add_option("--cache-dir", cache, "period cache directory ('none' disables it)");
  app.add_option("-o,--output", output, "output directory");
  app.add_option("-v,--verbosity", verbosity, "0 quiet, 1 report, 2 also the JSON summary");

  auto* structure = app.add_subcommand("structure", "branch points, singular points, genus");
  auto* periods = app.add_subcommand("periods", "cycles and period matrix, cached");
  auto* trajectory = app.add_subcommand("trajectory", "ode and/or theta trajectories");
  trajectory->add_option("-m,--method", method, "ode, theta or both")->check(CLI::IsMember({"ode", "theta", "both"}));
  auto* selftest = app.add_subcommand("selftest", "acceptance criteria 1-10");
  std::vector<int> only;
  bool no_stretch = false;
  selftest->add_option("--only", only, "criterion ids")->delimiter(',');
  selftest->add_flag("--no-stretch", no_stretch, "skip the SO4 trajectory stretch target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::ostringstream quiet;
  std::ostream& log = verbosity > 0 ? std::cout : quiet;
  try {
    if (selftest->parsed()) {
      harness::AcceptanceOptions opt;
      opt.only = only;
      opt.so4_stretch = !no_stretch;
      opt.cache_dir = cache == "none" ? "" : cache;
      const auto results = harness::run_acceptance(opt, std::cout);
      bool ok = true;
      for (const auto& r : results) ok = ok && r.pass;
      return ok ? 0 : 3;
    }
    harness::ExperimentConfig cfg = load(config, family, cache);
    if (!output.empty()) cfg.output_dir = output;
    harness::json summary;
    if (structure->parsed()) summary = harness::cmd_structure(cfg, log);
    if (periods->parsed()) summary = harness::cmd_periods(cfg, log);
    if (trajectory->parsed())
      summary = harness::cmd_trajectory(cfg, method.empty() ? cfg.method : harness::parse_method(method), log);
    if (verbosity > 1) std::cout << summary.dump(2) << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return harness::exit_code(e);
  }
}
