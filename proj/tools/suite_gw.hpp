#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>

#include "moyal/config.hpp"
#include "moyal/gw_model.hpp"
#include "moyal/noether.hpp"
#include "moyal/report.hpp"
#include "suite_common.hpp"

namespace moyal::cli {

inline nlohmann::ordered_json real_rows(const Eigen::MatrixXcd& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    std::vector<double> row;
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j).real());
    rows.push_back(row);
  }
  return rows;
}

inline void write_matrix_csv(const std::filesystem::path& path, const MatrixField& f) {
  std::ofstream os(path);
  os << "k,l,re,im\n" << std::setprecision(17);
  for (int k = 0; k < f.coeff.rows(); ++k)
    for (int l = 0; l < f.coeff.cols(); ++l)
      os << k << ',' << l << ',' << f.coeff(k, l).real() << ',' << f.coeff(k, l).imag() << '\n';
}

inline bool interior_cell(const AlgebraSpec& s, int k) {
  for (int p = 0; p < s.pairs(); ++p)
    if (s.component(k, p) > s.trunc - 3) return false;
  return true;
}

// Central-difference directional derivative of the action against ⟨η, R⟩.
inline double gradient_mismatch(const MatrixField& phi, const MatrixField& eta, const GWParams& p) {
  const double e = 1e-5;
  const double fd = (action(phi + e * eta, p) - action(phi - e * eta, p)) / (2.0 * e);
  const double an = contract(eta, eom_residual(phi, p).value);
  return std::abs(fd - an) / std::max(1.0, std::abs(an));
}

inline Report solve_gw(const RunConfig& c) {
  Report r;
  r.suite = "solve-gw";
  r.config = c.echo();
  const GWParams p = c.gw();
  p.validate();
  const int k = c.cell_k_flat(), l = c.cell_l_flat();
  const double tau = solve_tau(k, l, p);
  const MatrixField phi = MatrixField::cell(p.spec, k, l, tau);
  const EomResidual res = eom_residual(phi, p);
  const double s = action(phi, p);
  r.results["tau"] = tau;
  r.results["tau_bound"] = tau_bound(k, l, p);
  r.results["residual_norm"] = res.norm;
  r.results["action"] = s;

  if (interior_cell(p.spec, k))
    r.bound("solution.residual", res.norm, 1e-12, "tau^2 = (6/lambda)((4/theta)(|k|+|l|+D/2) - m^2)");
  else
    r.skip("solution.residual", "tau^2 = (6/lambda)((4/theta)(|k|+|l|+D/2) - m^2)",
           "cell touches the truncation edge");

  std::mt19937_64 rng(c.seed);
  double stationary = 0.0, gradient = 0.0;
  for (int t = 0; t < c.random_fields; ++t) {
    const MatrixField eta = random_supported(p.spec, rng, p.spec.trunc);
    const double e = 1e-5;
    const double fd = (action(phi + e * eta, p) - action(phi - e * eta, p)) / (2.0 * e);
    stationary = std::max(stationary, std::abs(fd) / std::max(1.0, std::abs(action(eta, p))));
    const MatrixField base = random_supported(p.spec, rng, p.spec.trunc, 0.5);
    gradient = std::max(gradient, gradient_mismatch(base, eta, p));
  }
  if (interior_cell(p.spec, k))
    r.bound("solution.stationary_directions", stationary, 1e-6, "d/de S(tau e_kl + e eta) = 0");
  else
    r.skip("solution.stationary_directions", "d/de S(tau e_kl + e eta) = 0", "cell touches the truncation edge");
  r.bound("action.gradient_consistency", gradient, 1e-6, "d/de S(phi + e eta) = <eta, R(phi)>");

  const TensorField t = energy_momentum(phi, p);
  r.results["tensor_integrals"] = real_rows(integrate_tensor(t));

  const std::filesystem::path dir(c.out);
  std::filesystem::create_directories(dir);
  write_matrix_csv(dir / "solution_matrix.csv", phi);
  const GridSpec g = c.grid();
  g.validate();
  write_grid_binary((dir / "solution_grid.bin").string(), reconstruct(phi, g), p.theta);
  return r;
}

// Parameter point where the massless integrated trace is checked.
inline GWParams trace_point() { return GWParams{4.0, 1.0, 0.0, 6.0, AlgebraSpec{4.0, 2, 8}}; }

inline Report tensors(const RunConfig& c) {
  Report r;
  r.suite = "tensors";
  r.config = c.echo();
  const GWParams p = c.gw();
  p.validate();
  std::mt19937_64 rng(c.seed);
  const int d = p.spec.dim;
  const int support = std::max(1, interior_support(p.spec));

  double asym = 0.0, div = 0.0, current = 0.0;
  for (int trial = 0; trial < std::max(1, c.random_fields / 4); ++trial) {
    const MatrixField f = random_supported(p.spec, rng, support, 0.5);
    const TensorField t = energy_momentum(f, p);
    for (int rho = 0; rho < d; ++rho)
      for (int mu = 0; mu < d; ++mu) asym = std::max(asym, (t.at(rho, mu).coeff - t.at(mu, rho).coeff).norm());
    for (int mu = 0; mu < d; ++mu) {
      cplx sum = 0.0;
      for (int rho = 0; rho < d; ++rho) sum += integrate_matrix(partial(t.at(rho, mu), rho));
      div = std::max(div, std::abs(sum));
    }
    std::normal_distribution<double> nd;
    GeneratorSpec gen{Rotation::Zero(d, d), std::vector<double>(d), {}, {}};
    for (auto& e : gen.eps) e = nd(rng);
    const auto j = noether_current(f, generator_fields(gen, f), p);
    for (int mu = 0; mu < d; ++mu) {
      Matrix want = Matrix::Zero(t.at(mu, 0).coeff.rows(), t.at(mu, 0).coeff.cols());
      for (int nu = 0; nu < d; ++nu) want += gen.eps[nu] * t.at(mu, nu).coeff;
      current = std::max(current, (j[mu].coeff - want).norm());
    }
  }
  r.bound("tensor.symmetric", asym, 0.0, "T_rho_mu = T_mu_rho");
  if (interior_support(p.spec) < 1)
    r.skip("tensor.divergence", "int d^rho T_rho_mu = 0", "truncation leaves no interior cells");
  else
    r.bound("tensor.divergence", div, 1e-8, "int d^rho T_rho_mu = 0");
  r.bound("current.translation", current, 1e-12, "j^mu(translation eps) = eps^nu T^mu_nu");

  const GWParams tp = trace_point();
  const MatrixField ground = MatrixField::cell(tp.spec, 0, 0, solve_tau(0, 0, tp));
  const double trace = std::abs(integrate_tensor(energy_momentum(ground, tp)).trace());
  r.floor("tensor.massless_trace", trace, 1e-3, "|int T^mu_mu| at theta=4, Omega=1, m^2=0, lambda=6, tau e_00");
  r.results["massless_trace"] = trace;

  const MatrixField sample = random_supported(p.spec, rng, support, 0.5);
  const std::filesystem::path dir(c.out);
  std::filesystem::create_directories(dir);
  write_tensor_csv((dir / "energy_momentum.csv").string(), energy_momentum(sample, p));
  write_tensor_csv((dir / "angular_momentum.csv").string(), angular_momentum(sample, p, Ordering::symmetric));
  r.results["energy_momentum_integrals"] = real_rows(integrate_tensor(energy_momentum(sample, p)));
  return r;
}

}  // namespace moyal::cli
