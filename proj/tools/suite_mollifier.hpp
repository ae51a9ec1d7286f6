#pragma once

#include <cmath>
#include <filesystem>
#include <functional>

#include "moyal/config.hpp"
#include "moyal/mollifier.hpp"
#include "moyal/report.hpp"

namespace moyal::cli {

inline Report mollifier_scan(const RunConfig& c) {
  Report r;
  r.suite = "mollifier-scan";
  r.config = c.echo();
  struct Case {
    const char* name;
    std::function<double(double)> f;
    double lipschitz;  // 0 when the function is not Lipschitz
  };
  const std::vector<Case> cases = {
      {"step", [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? 0.0 : 0.5); }, 0.0},
      {"constant", [](double) { return -7.0; }, 0.0},
      {"linear", [](double x) { return 3.0 * x + 1.0; }, 3.0},
      {"gaussian", [](double x) { return std::exp(-8.0 * x * x); }, 4.0 * std::exp(-0.5)},
      {"sine", [](double x) { return std::sin(5.0 * x); }, 5.0},
  };
  const std::filesystem::path dir(c.out);
  std::filesystem::create_directories(dir);
  double worst_bound = -INFINITY;
  for (const auto& cs : cases) {
    const auto f = Sampled1D::sample(-1.0, 1.0, 4001, cs.f);
    const auto rows = convergence_scan(f, c.hs, cs.lipschitz);
    write_scan_csv((dir / (std::string("scan_") + cs.name + ".csv")).string(), rows);
    nlohmann::ordered_json errs = nlohmann::ordered_json::array();
    for (const auto& row : rows) errs.push_back(row.l1_error);
    r.results[cs.name] = errs;

    if (std::string(cs.name) == "step") {
      // largest ratio err(h_{i+1}) / err(h_i); strictly below 1 when monotone
      double ratio = 0.0;
      for (std::size_t i = 1; i < rows.size(); ++i)
        ratio = std::max(ratio, rows[i].l1_error / rows[i - 1].l1_error);
      Check& m = r.bound("scan.step_monotone", ratio, 1.0, "||L_h - L||_1 decreases as h shrinks");
      if (!(ratio < 1.0)) m.status = CheckStatus::fail;
    } else if (std::string(cs.name) == "constant") {
      double worst = 0.0;
      for (const auto& row : rows) worst = std::max(worst, row.l1_error);
      r.bound("scan.constant_zero", worst, 0.0, "L_h = L for constant L");
    } else {
      for (const auto& row : rows) worst_bound = std::max(worst_bound, row.l1_error - row.lipschitz_bound);
    }
  }
  // positive excess means some row broke ||L_h - L||_1 <= K h |D|
  r.bound("scan.lipschitz_bound", std::max(worst_bound, 0.0), 0.0, "||L_h - L||_1 <= K h |D|");
  r.results["lipschitz_excess"] = worst_bound;
  return r;
}

}  // namespace moyal::cli
