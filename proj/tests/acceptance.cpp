// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <cstdio>
#include <exception>
#include <iostream>

#include "umbilic4/acceptance.hpp"

using namespace umbilic4;

int main(int argc, char** argv) {
  AcceptanceConfig cfg;
  try {
    cfg.seed = seed_from_env(1);
    cfg.tol_scale = tol_scale_from_env();
    for (int i = 1; i < argc; ++i) cfg.filter.emplace_back(argv[i]);
    const auto tol = resolve_tolerances(cfg);
    int failed = 0;
    for (const auto& info : select_criteria(cfg.filter)) {
      const CriterionResult r = run_criterion(info.id, tol, cfg);
      std::printf("%s  criterion %2d  %-30s [%s]\n", r.pass ? "PASS" : "FAIL", info.id, info.name.c_str(),
                  info.module.c_str());
      for (const auto& f : r.failures) std::printf("        %s\n", f.c_str());
      std::fflush(stdout);
      if (!r.pass) ++failed;
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
