// One PASS/FAIL line per acceptance criterion, details indented below it.
// Usage: acceptance [--skip-blowup] [--json PATH]

#include <chrono>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "halfwave/checks.hpp"
#include "halfwave/experiment.hpp"

using namespace halfwave;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Criterion {
  int id;
  CheckTable table;
};

void report(const Criterion& c) {
  std::cout << (c.table.passed() ? "PASS" : "FAIL") << " criterion " << c.id << ": "
            << c.table.title() << "\n";
  c.table.print(std::cout);
  std::cout.flush();
}

}  // namespace

int main(int argc, char** argv) {
  bool blowup = true;
  std::string json_path;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--skip-blowup")) {
      blowup = false;
    } else if (!std::strcmp(argv[i], "--json") && i + 1 < argc) {
      json_path = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--skip-blowup] [--json PATH]\n";
      return 1;
    }
  }

  std::vector<Criterion> out;
  auto add = [&](int id, CheckTable t) {
    out.push_back({id, std::move(t)});
    report(out.back());
  };

  try {
    auto t0 = Clock::now();
    const GroundState gs = solve_ground_state(make_grid(64.0, 512), 1e-10, 2000);
    const GroundState big = solve_ground_state(make_grid(128.0, 1024), 1e-10, 2000);
    add(1, ground_state_table(gs, big, seconds_since(t0)));

    const ProfileSet ps = build_profile_set(solve_ground_state(make_grid(16.0, 1024), 1e-11, 3000));
    const ProfileSet pp = build_profile_set(solve_ground_state(make_grid(8.0, 512), 1e-11, 3000));
    add(2, identity_table(ps));
    add(3, residual_scan_table(ps, pp));
    add(4, expansion_table(ps));
    t0 = Clock::now();
    const ModContext ctx(ps);
    const double context_seconds = seconds_since(t0);
    add(5, decomposition_table(ctx));
    add(6, integrator_table(integrator_study()));

    if (blowup) {
      BlowupConfig cfg;
      cfg.E0_over_e1 = 1.0;
      cfg.P0_over_p1 = {0.05, 0.0};
      cfg.t_start = -0.5;
      t0 = Clock::now();
      const BlowupSeries s = run_blowup(cfg, ctx);
      const FitReport fit = fit_blowup_laws(s);
      add(7, blowup_table(fit, s.constants, context_seconds + seconds_since(t0)));
      add(8, ode_consistency_table(fit));
    }

    add(9, coercivity_table(coercivity_study(ps), coercivity_study(pp)));
  } catch (const std::exception& e) {
    std::cout << "ERROR " << e.what() << "\n";
    return 2;
  }

  int failed = 0;
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : out) {
    failed += !c.table.passed();
    auto row = c.table.to_json();
    row["criterion"] = c.id;
    j.push_back(row);
  }
  std::cout << "\nsummary:";
  for (const auto& c : out) std::cout << " " << c.id << (c.table.passed() ? "=PASS" : "=FAIL");
  std::cout << "\n" << out.size() - failed << " of " << out.size() << " criteria passed\n";
  if (!json_path.empty()) std::ofstream(json_path) << j.dump(2) << "\n";
  return failed ? 3 : 0;
}
