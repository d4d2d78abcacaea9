#include <CLI11.hpp>

#include <iostream>

#include "harness/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  harness::AcceptanceOptions opt;
  bool no_stretch = false;
  app.add_option("--only", opt.only, "criterion ids")->delimiter(',');
  app.add_option("--cache-dir", opt.cache_dir, "period cache");
  app.add_flag("--no-stretch", no_stretch, "skip the SO4 trajectory stretch target");
  CLI11_PARSE(app, argc, argv);
  opt.so4_stretch = !no_stretch;
  const auto results = harness::run_acceptance(opt, std::cout);
  int failed = 0;
  for (const auto& r : results) failed += !r.pass;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
