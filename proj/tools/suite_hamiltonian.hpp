#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>

#include "moyal/config.hpp"
#include "moyal/hamiltonian.hpp"
#include "moyal/report.hpp"
#include "suite_gw.hpp"

namespace moyal::cli {

inline ToyPoint sampled_toy(const LambdaGrid& g, double m) {
  ToyPoint pt{g, std::vector<double>(g.points), std::vector<double>(g.points), 0.0};
  for (int i = 0; i < g.points; ++i) pt.Q[i] = std::cos(m * g.node(i));
  return pt;
}

inline NonlocalLagrangianSpec toy_spec(const RunConfig& c, bool local) {
  NonlocalLagrangianSpec s;
  s.mode = Mode::toy;
  s.mass = c.toy_mass;
  s.coupling = local ? 0.0 : c.toy_coupling;
  s.delay = local ? 0.0 : c.toy_delay;
  s.h = c.h;
  return s;
}

inline void toy_checks(Report& r, const RunConfig& c, const LambdaGrid& g) {
  const double m = c.toy_mass;
  if (!(m > 0.0)) throw ConfigError("toy.mass", "toy.mass must be positive");
  const double cycles = m * g.extent / std::numbers::pi;
  if (std::abs(cycles - std::round(cycles)) > 1e-9 || std::round(cycles) < 1)
    throw ConfigError("lambda_grid.extent", "lambda_grid.extent * toy.mass / pi must be a positive integer");

  const auto local = toy_spec(c, true);
  local.validate(g);
  ToyPoint pt = sampled_toy(g, m);
  pt.P = constraint_momentum(pt.Q, g, local);
  const double dt = g.spacing();
  const int steps = static_cast<int>(std::round(c.periods * 2.0 * std::numbers::pi / m / dt));
  const int z = g.zero_index();
  std::vector<TrajectoryRow> rows;
  double worst_q = 0.0, worst_gamma = 0.0, worst_xi = 0.0;
  auto record = [&] {
    TrajectoryRow row{pt.t, pt.Q[z], field_norm(primary_constraint(pt, local), g),
                      std::abs(secondary_constraint(pt, local)), hamiltonian_eval(pt, local)};
    worst_gamma = std::max(worst_gamma, row.gamma);
    worst_xi = std::max(worst_xi, row.xi);
    rows.push_back(row);
  };
  record();
  for (int n = 1; n <= steps; ++n) {
    pt = evolve(pt, dt, local);
    worst_q = std::max(worst_q, std::abs(pt.Q[z] - std::cos(m * pt.t)));
    if (n % 16 == 0 || n == steps) record();
  }
  r.bound("toy.oscillator", worst_q, 1e-6, "q(t, 0) = cos(m t) in the local limit");
  r.bound("toy.local_primary", worst_gamma, 1e-6, "Gamma = P - Pi[Q] stays zero along the flow");
  r.bound("toy.local_secondary", worst_xi, 1e-6, "Xi = int delta_h E = 0 along the flow");
  r.results["toy_steps"] = steps;
  r.results["toy_final_time"] = pt.t;
  write_trajectory_csv((std::filesystem::path(c.out) / "toy_trajectory.csv").string(), rows);

  const auto nonlocal = toy_spec(c, false);
  nonlocal.validate(g);
  ToyPoint zero{g, std::vector<double>(g.points), std::vector<double>(g.points), 0.0};
  const double z_norm = field_norm(primary_constraint(zero, nonlocal), g) + std::abs(secondary_constraint(zero, nonlocal)) +
                        field_norm(euler_lagrange(zero, nonlocal), g);
  r.bound("toy.zero_state", z_norm, 0.0, "Q = P = 0 gives Gamma = Xi = E = 0");

  ToyPoint q = sampled_toy(g, m);
  q.P = constraint_momentum(q.Q, g, nonlocal);
  const auto st = constraint_stability_check(q, nonlocal, dt);
  r.bound("toy.stability", st.defect / (1.0 + st.transported), 1e-8,
          "Gamma(t+dt) - Gamma(t, .+dt) = E (eps_h(.+dt) - eps_h)/2");
  r.results["toy_xi"] = st.xi;
}

inline void gw_checks(Report& r, const RunConfig& c, const LambdaGrid& g) {
  const char* xi_anchor = "Xi = int delta_h (E_GW) = 0 on the static solution";
  const char* st_anchor = "Gamma stability over one step on the static solution";
  NonlocalLagrangianSpec s;
  s.mode = Mode::gw;
  s.gw = c.gw();
  s.h = c.h;
  const int k = c.cell_k_flat(), l = c.cell_l_flat();
  if (std::abs(s.gw.omega - 1.0) > 1e-12 || k != l || !interior_cell(s.gw.spec, k)) {
    const char* why = "static solution needs omega = 1 and an interior diagonal cell";
    r.skip("gw.static_secondary", xi_anchor, why);
    r.skip("gw.static_stability", st_anchor, why);
    return;
  }
  s.validate(g);
  const MatrixField cell = MatrixField::cell(s.gw.spec, k, k, solve_tau(k, k, s.gw));
  const GWPoint pt{g, std::vector<MatrixField>(g.points, cell), std::vector<MatrixField>(g.points, MatrixField(s.gw.spec)),
                   0.0};
  r.bound("gw.static_secondary", secondary_constraint(pt, s).norm(), 1e-10, xi_anchor);
  const auto st = constraint_stability_check(pt, s, g.spacing());
  r.bound("gw.static_stability", st.defect, 1e-5, st_anchor);
  r.bound("gw.static_primary", field_norm(primary_constraint(pt, s), g), 1e-12, "Gamma = P - sigma omega_h Q' = 0");
  r.results["gw_static_hamiltonian"] = hamiltonian_eval(pt, s);
}

inline Report hamiltonian_demo(const RunConfig& c) {
  Report r;
  r.suite = "hamiltonian-demo";
  r.config = c.echo();
  const LambdaGrid g{c.lambda_extent, c.lambda_points};
  g.validate();
  std::filesystem::create_directories(c.out);
  toy_checks(r, c, g);
  gw_checks(r, c, g);
  return r;
}

}  // namespace moyal::cli
