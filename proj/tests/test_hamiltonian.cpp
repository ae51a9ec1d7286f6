#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "moyal/hamiltonian.hpp"

using namespace moyal;

namespace {

constexpr double kPi = std::numbers::pi;

ToyPoint toy_point(const LambdaGrid& g, const std::function<double(double)>& q,
                   const std::function<double(double)>& p = [](double) { return 0.0; }) {
  ToyPoint pt{g, std::vector<double>(g.points), std::vector<double>(g.points), 0.0};
  for (int i = 0; i < g.points; ++i) {
    pt.Q[i] = q(g.node(i));
    pt.P[i] = p(g.node(i));
  }
  return pt;
}

NonlocalLagrangianSpec toy(double m, double g, double rho, double h) {
  NonlocalLagrangianSpec s;
  s.mode = Mode::toy;
  s.mass = m;
  s.coupling = g;
  s.delay = rho;
  s.h = h;
  return s;
}

NonlocalLagrangianSpec gw_spec(double h) {
  NonlocalLagrangianSpec s;
  s.mode = Mode::gw;
  s.gw = GWParams{2.0, 1.0, 0.5, 3.0, AlgebraSpec{2.0, 2, 5}};
  s.h = h;
  return s;
}

MatrixField random_hermitian(const AlgebraSpec& s, std::mt19937_64& rng, int support, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  MatrixField f(s);
  for (int k = 0; k < support; ++k)
    for (int l = 0; l < support; ++l) f.coeff(k, l) = cplx(nd(rng), nd(rng));
  f.coeff = 0.5 * (f.coeff + f.coeff.adjoint()).eval();
  return f;
}

GWPoint static_gw_point(const LambdaGrid& g, const NonlocalLagrangianSpec& s) {
  const MatrixField cell = MatrixField::cell(s.gw.spec, 0, 0, solve_tau(0, 0, s.gw));
  return GWPoint{g, std::vector<MatrixField>(g.points, cell), std::vector<MatrixField>(g.points, MatrixField(s.gw.spec)),
                 0.0};
}

// Static solution plus a smooth λ-dependent Hermitian perturbation.
GWPoint moving_gw_point(const LambdaGrid& g, const NonlocalLagrangianSpec& s, std::mt19937_64& rng) {
  GWPoint pt = static_gw_point(g, s);
  const MatrixField a = random_hermitian(s.gw.spec, rng, 3, 0.1), b = random_hermitian(s.gw.spec, rng, 3, 0.1);
  for (int i = 0; i < g.points; ++i) {
    const double l = g.node(i) * kPi / g.extent;
    pt.Q[i] = pt.Q[i] + std::sin(l) * a + std::cos(2.0 * l) * b;
  }
  return pt;
}

}  // namespace

TEST(LambdaGridSpec, Validation) {
  EXPECT_THROW((LambdaGrid{1.0, 32}.validate()), DomainError);
  EXPECT_THROW((LambdaGrid{1.0, 65}.validate()), DomainError);
  EXPECT_THROW((LambdaGrid{0.0, 64}.validate()), DomainError);
  const LambdaGrid g{1.0, 64};
  EXPECT_EQ(g.node(g.zero_index()), 0.0);
  EXPECT_THROW(toy(1.0, 0.0, 0.0, 0.01).validate(g), ResolutionError);
  EXPECT_THROW(toy(1.0, 0.1, 0.9, 0.2).validate(g), DomainError);
}

TEST(Hamiltonian, ZeroState) {
  const LambdaGrid g{2.0 * kPi, 128};
  EXPECT_EQ(hamiltonian_eval(toy_point(g, [](double) { return 0.0; }), toy(1.0, 0.3, 0.5, 0.5)), 0.0);
}

TEST(Hamiltonian, OscillatorLimit) {
  const LambdaGrid g{2.0 * kPi, 4096};
  const auto pt = toy_point(g, [](double l) { return std::cos(l); });
  double prev = 1.0;
  for (double h : {0.2, 0.1, 0.05}) {
    const double err = std::abs(hamiltonian_eval(pt, toy(1.0, 0.0, 0.0, h)) - 0.5);
    EXPECT_LT(err, 0.2 * h * h);
    EXPECT_LT(err, prev);
    prev = err;
  }
}

TEST(Hamiltonian, LinearInMomentum) {
  const LambdaGrid g{2.0 * kPi, 256};
  const auto s = toy(1.3, 0.2, 0.4, 0.3);
  const auto a = toy_point(g, [](double l) { return std::sin(l) + 0.2 * std::cos(3.0 * l); },
                           [](double l) { return std::exp(-l * l); });
  auto b = a;
  for (auto& v : b.P) v *= 2.0;
  const auto dq = lambda_derivative(a.Q, g);
  double pq = 0.0;
  for (int i = 0; i < g.points; ++i) pq += a.P[i] * dq[i] * g.spacing();
  EXPECT_NEAR(hamiltonian_eval(b, s) - hamiltonian_eval(a, s), pq, 1e-12);
}

TEST(Evolve, IdentityAndComposition) {
  const LambdaGrid g{2.0 * kPi, 128};
  const auto s = toy(1.0, 0.25, 0.6, 0.4);
  const auto pt = toy_point(g, [](double l) { return std::sin(l) + 0.3 * std::cos(2.0 * l); },
                            [](double l) { return 0.1 * std::sin(3.0 * l); });
  const auto same = evolve(pt, 0.0, s);
  EXPECT_EQ(same.Q, pt.Q);
  EXPECT_EQ(same.P, pt.P);
  const double dt = 0.137;
  const auto one = evolve(pt, dt, s);
  const auto two = evolve(evolve(pt, 0.5 * dt, s), 0.5 * dt, s);
  for (int i = 0; i < g.points; ++i) EXPECT_NEAR(one.Q[i], two.Q[i], 1e-10);
  EXPECT_NEAR(field_norm(one.Q, g), field_norm(pt.Q, g), 1e-12);
  EXPECT_THROW(evolve(pt, 7.0, s), RangeError);
}

TEST(Evolve, TransportMatchesClosedForm) {
  const LambdaGrid g{2.0 * kPi, 128};
  const auto pt = toy_point(g, [](double l) { return std::sin(l); });
  for (double dt : {0.01, 0.3, 1.234}) {
    const auto out = evolve(pt, dt, toy(1.0, 0.0, 0.0, 0.4));
    EXPECT_NEAR(out.Q[g.zero_index()], std::sin(dt), 1e-8);
    EXPECT_DOUBLE_EQ(out.t, dt);
  }
}

TEST(Evolve, TransportCommutesWithTranslation) {
  const LambdaGrid g{2.0 * kPi, 128};
  const auto s = toy(1.0, 0.0, 0.0, 0.4);
  const auto pt = toy_point(g, [](double l) { return std::exp(std::cos(l)); });
  auto shifted = pt;
  shifted.Q = lambda_shift(pt.Q, g, 3 * g.spacing());
  const auto a = evolve(shifted, 0.21, s).Q;
  const auto b = lambda_shift(evolve(pt, 0.21, s).Q, g, 3 * g.spacing());
  for (int i = 0; i < g.points; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

// q(t) = Q(t, 0) over ten periods of the local oscillator, starting on the constraint surface.
TEST(Evolve, OscillatorTrajectoryTenPeriods) {
  const double m = 1.0;
  const LambdaGrid g{2.0 * kPi, 256};
  const auto s = toy(m, 0.0, 0.0, 0.2);
  auto pt = toy_point(g, [m](double l) { return std::cos(m * l); });
  pt.P = constraint_momentum(pt.Q, g, s);
  const double dt = g.spacing();
  const int steps = static_cast<int>(std::round(20.0 * kPi / dt));
  double worst_q = 0.0, worst_el = 0.0, worst_gamma = 0.0, worst_xi = 0.0;
  for (int n = 1; n <= steps; ++n) {
    pt = evolve(pt, dt, s);
    worst_q = std::max(worst_q, std::abs(pt.Q[g.zero_index()] - std::cos(m * pt.t)));
    const auto e = euler_lagrange(pt, s);
    worst_el = std::max(worst_el, std::abs(e[g.zero_index()]));
    if (n % 64 == 0) {
      worst_gamma = std::max(worst_gamma, field_norm(primary_constraint(pt, s), g));
      worst_xi = std::max(worst_xi, std::abs(secondary_constraint(pt, s)));
    }
  }
  EXPECT_GT(pt.t, 20.0 * kPi - dt);
  EXPECT_LT(worst_q, 1e-10);
  EXPECT_LT(worst_el, 1e-6);
  EXPECT_LT(worst_gamma, 1e-8);
  EXPECT_LT(worst_xi, 1e-6);
}

TEST(Evolve, MomentumSourceMatchesQuadrature) {
  const LambdaGrid g{2.0 * kPi, 256};
  const auto s = toy(1.1, 0.3, 0.5, 0.4);
  const auto pt = toy_point(g, [](double l) { return std::sin(l) + 0.4 * std::cos(2.0 * l); },
                            [](double l) { return 0.2 * std::cos(l); });
  const double dt = 4 * g.spacing();
  const auto out = evolve(pt, dt, s);
  // ∫_0^dt S(t+s, λ+dt−s) ds by midpoint sums over exact cell shifts
  const int sub = 4;
  std::vector<double> acc(g.points, 0.0);
  const auto p0 = lambda_shift(pt.P, g, dt);
  for (int j = 0; j < 4 * sub; ++j) {
    const double sj = (j + 0.5) * dt / (4 * sub);
    auto q = pt;
    q.Q = lambda_shift(pt.Q, g, sj);
    const auto src = functional_derivative(q, s);
    const auto moved = lambda_shift(src, g, dt - sj);
    for (int i = 0; i < g.points; ++i) acc[i] += moved[i] * dt / (4 * sub);
  }
  double err = 0.0, ref = 0.0;
  for (int i = 0; i < g.points; ++i) {
    err = std::max(err, std::abs(out.P[i] - p0[i] - acc[i]));
    ref = std::max(ref, std::abs(acc[i]));
  }
  EXPECT_GT(ref, 1e-3);
  EXPECT_LT(err, 2e-3 * ref);
}

// Γ from the definition: P(λ_j) = Σ_i (ε_h(λ_j) − ε_h(σ_i))/2 ∂𝓛(σ_i)/∂Q_j with the discrete Jacobian.
TEST(Constraints, PrimaryMatchesDiscreteJacobian) {
  const LambdaGrid g{8.0, 2048};
  const auto s = toy(0.9, 0.35, 0.8, 0.5);
  const auto pt = toy_point(g, [](double l) { return std::exp(-l * l) * (1.0 + 0.5 * l); },
                            [](double l) { return std::exp(-(l - 1.0) * (l - 1.0)); });
  const int k = g.points;
  Eigen::MatrixXd d(k, k), shift(k, k);
  for (int j = 0; j < k; ++j) {
    std::vector<double> e(k, 0.0);
    e[j] = 1.0;
    const auto de = lambda_derivative(e, g);
    const auto se = lambda_shift(e, g, s.delay);
    for (int i = 0; i < k; ++i) {
      d(i, j) = de[i];
      shift(i, j) = se[i];
    }
  }
  const Eigen::Map<const Eigen::VectorXd> q(pt.Q.data(), k);
  const Eigen::VectorXd dq = d * q, sq = shift * q;
  Eigen::MatrixXd jac = dq.asDiagonal() * d;
  jac.diagonal() -= s.mass * s.mass * q + s.coupling * sq;
  jac -= s.coupling * q.asDiagonal() * shift;
  const auto gamma = primary_constraint(pt, s);
  std::vector<double> eps(k);
  for (int i = 0; i < k; ++i) eps[i] = eps_h(g.node(i), s.h);
  double err = 0.0;
  for (int j = 0; j < k; ++j) {
    double pj = 0.0;
    for (int i = 0; i < k; ++i) pj += 0.5 * (eps[j] - eps[i]) * jac(i, j);
    err = std::max(err, std::abs(gamma[j] - (pt.P[j] - pj)));
  }
  // the discrete summation by parts converges spectrally in the cells per h
  EXPECT_LT(err, 5e-6);
}

TEST(Constraints, ZeroAndSurface) {
  const LambdaGrid g{2.0 * kPi, 128};
  const auto s = toy(1.0, 0.2, 0.5, 0.4);
  const auto zero = toy_point(g, [](double) { return 0.0; });
  EXPECT_EQ(field_norm(primary_constraint(zero, s), g), 0.0);
  EXPECT_EQ(secondary_constraint(zero, s), 0.0);
  auto pt = toy_point(g, [](double l) { return std::cos(l); });
  pt.P = constraint_momentum(pt.Q, g, toy(1.0, 0.0, 0.0, 0.4));
  EXPECT_LT(field_norm(primary_constraint(pt, toy(1.0, 0.0, 0.0, 0.4)), g), 1e-6);
}

TEST(Constraints, SecondaryVanishesOnLocalSolution) {
  const LambdaGrid g{2.0 * kPi, 256};
  for (double m : {1.0, 2.0, 3.0}) {
    const auto pt = toy_point(g, [m](double l) { return std::cos(m * l); });
    EXPECT_LT(std::abs(secondary_constraint(pt, toy(m, 0.0, 0.0, 0.3))), 1e-6);
  }
  const auto off = toy_point(g, [](double l) { return std::cos(l); });
  EXPECT_GT(std::abs(secondary_constraint(off, toy(2.0, 0.0, 0.0, 0.3))), 0.5);
}

TEST(Stability, OscillatorOnSurface) {
  const LambdaGrid g{2.0 * kPi, 256};
  const auto s = toy(1.0, 0.0, 0.0, 0.3);
  auto pt = toy_point(g, [](double l) { return std::cos(l); });
  pt.P = constraint_momentum(pt.Q, g, s);
  for (int cells : {1, 3}) {
    const auto r = constraint_stability_check(pt, s, cells * g.spacing());
    EXPECT_TRUE(r.on_surface);
    EXPECT_LT(r.defect, 1e-6);
    EXPECT_LT(r.transported, 1e-6);
  }
  // off-lattice steps interpolate the kernel-shaped momentum spectrally
  const LambdaGrid fine{2.0 * kPi, 2048};
  auto q = toy_point(fine, [](double l) { return std::cos(l); });
  q.P = constraint_momentum(q.Q, fine, s);
  EXPECT_LT(constraint_stability_check(q, s, 0.05).defect, 1e-6);
}

TEST(Stability, OffShellChangeTracksSecondary) {
  const LambdaGrid g{2.0 * kPi, 256};
  const auto s = toy(1.2, 0.3, 0.7, 0.3);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::array<double, 6> c{};
  for (auto& v : c) v = nd(rng);
  auto pt = toy_point(g, [&](double l) {
    return c[0] * std::sin(l) + c[1] * std::cos(l) + c[2] * std::sin(2 * l) + c[3] * std::cos(3 * l) + c[4];
  });
  pt.P = constraint_momentum(pt.Q, g, s);
  const double dt = g.spacing();
  const auto r = constraint_stability_check(pt, s, dt);
  EXPECT_LT(r.defect, 1e-10 * (1.0 + r.transported));
  EXPECT_GT(r.xi, 1e-3);
  EXPECT_GT(r.change_integral, 0.5 * r.xi);
  EXPECT_LT(r.change_integral, 2.0 * r.xi);
  // the change is confined to the support of ω_h around λ = 0
  const auto g0 = lambda_shift(primary_constraint(pt, s), g, dt);
  const auto g1 = primary_constraint(evolve(pt, dt, s), s);
  for (int i = 0; i < g.points; ++i)
    if (std::abs(g.node(i)) > s.h + dt) EXPECT_LT(std::abs(g1[i] - g0[i]), 1e-10);
}

TEST(Stability, SecondOrderInStep) {
  const LambdaGrid g{2.0 * kPi, 512};
  const auto s = toy(1.0, 0.0, 0.0, 0.3);
  auto pt = toy_point(g, [](double l) { return std::cos(l); });
  pt.P = constraint_momentum(pt.Q, g, s);
  for (int cells : {1, 2, 4, 8}) {
    const double dt = cells * g.spacing();
    const auto r = constraint_stability_check(pt, s, dt);
    EXPECT_LT(r.transported, 1e-3 * dt * dt);
  }
}

TEST(Bracket, DiscreteKernel) {
  const LambdaGrid coarse{2.0 * kPi, 512}, fine{2.0 * kPi, 1024};
  const auto a = poisson_bracket_check(coarse, 0.2);
  const auto b = poisson_bracket_check(fine, 0.2);
  EXPECT_EQ(a.far_field, 0.0);
  EXPECT_EQ(a.antisymmetry, 0.0);
  EXPECT_EQ(b.far_field, 0.0);
  // faster than second order in Δλ once h spans ~10 cells
  EXPECT_LT(b.two_sided, a.two_sided / 4.0);
  EXPECT_LT(b.one_sided, a.one_sided / 4.0);
  EXPECT_LT(b.two_sided, 1e-4);
  EXPECT_LT(b.one_sided, 1e-4 * omega_h(0.0, 0.2));
  EXPECT_NEAR(b.diagonal, detail::kernel_square(0.0, 0.2), 1e-4);
  EXPECT_LT(a.diagonal, omega_h(0.0, 0.2));
}

TEST(TotalHamiltonian, MultiplierProperties) {
  const LambdaGrid g{2.0 * kPi, 128};
  const auto s = toy(1.0, 0.2, 0.5, 0.4);
  const auto pt = toy_point(g, [](double l) { return std::sin(l) + 0.3 * std::cos(2.0 * l); },
                            [](double l) { return std::cos(l); });
  const std::vector<double> zero(g.points, 0.0);
  EXPECT_DOUBLE_EQ(total_hamiltonian(pt, zero, 0.0, s), hamiltonian_eval(pt, s));
  std::vector<double> l1(g.points);
  for (int i = 0; i < g.points; ++i) l1[i] = std::sin(g.node(i));
  std::vector<double> l2x = l1;
  for (auto& v : l2x) v *= 2.0;
  const double h0 = total_hamiltonian(pt, zero, 0.0, s), h1 = total_hamiltonian(pt, l1, 0.7, s),
               h2 = total_hamiltonian(pt, l2x, 1.4, s);
  EXPECT_NEAR(h2 - h1, h1 - h0, 1e-12 * (1.0 + std::abs(h1)));
  EXPECT_THROW(total_hamiltonian(pt, std::vector<double>(5), 0.0, s), ShapeError);

  const auto s0 = toy(1.0, 0.0, 0.0, 0.4);
  auto on = toy_point(g, [](double l) { return std::cos(l); });
  on.P = constraint_momentum(on.Q, g, s0);
  EXPECT_LT(std::abs(total_hamiltonian(on, l1, 3.0, s0) - hamiltonian_eval(on, s0)), 1e-5);
}

TEST(Mollified, CauchyConvergence) {
  const LambdaGrid g{2.0 * kPi, 4096};
  auto pt = toy_point(g, [](double l) { return std::cos(l) + 0.5 * std::sin(2.0 * l); },
                      [](double l) { return 0.3 * std::sin(l); });
  std::vector<double> xi, pairing;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto s = toy(1.5, 0.2, 0.6, h);
    xi.push_back(secondary_constraint(pt, s));
    const auto gam = primary_constraint(pt, s);
    double acc = 0.0;
    for (int i = 0; i < g.points; ++i) acc += gam[i] * std::exp(-g.node(i) * g.node(i)) * g.spacing();
    pairing.push_back(acc);
  }
  EXPECT_LT(std::abs(xi[2] - xi[1]), std::abs(xi[1] - xi[0]));
  EXPECT_LT(std::abs(pairing[2] - pairing[1]), std::abs(pairing[1] - pairing[0]));
}

TEST(GWMode, StaticSolution) {
  const LambdaGrid g{2.0, 64};
  const auto s = gw_spec(0.25);
  const GWPoint pt = static_gw_point(g, s);
  EXPECT_LT(field_norm(primary_constraint(pt, s), g), 1e-12);
  EXPECT_LT(secondary_constraint(pt, s).norm(), 1e-10);
  const auto r = constraint_stability_check(pt, s, g.spacing());
  EXPECT_LT(r.defect, 1e-5);
  const GWPoint later = evolve(pt, 3 * g.spacing(), s);
  for (int i = 0; i < g.points; ++i) EXPECT_LT((later.Q[i] - pt.Q[i]).norm() + later.P[i].norm(), 1e-10);
}

TEST(GWMode, HamiltonianIsActionForStaticSlices) {
  const LambdaGrid g{2.0, 64};
  const auto s = gw_spec(0.25);
  const GWPoint pt = static_gw_point(g, s);
  EXPECT_NEAR(hamiltonian_eval(pt, s), -action(pt.Q.front(), s.gw), 1e-10);
}

TEST(GWMode, MovingStateConstraintChain) {
  std::mt19937_64 rng(41);
  const LambdaGrid g{2.0, 64};
  const auto s = gw_spec(0.25);
  GWPoint pt = moving_gw_point(g, s, rng);
  pt.P = constraint_momentum(pt.Q, g, s);
  EXPECT_LT(field_norm(primary_constraint(pt, s), g), 1e-12);
  const auto r = constraint_stability_check(pt, s, g.spacing());
  EXPECT_TRUE(r.on_surface);
  EXPECT_LT(r.defect, 1e-8 * (1.0 + r.transported));
  EXPECT_GT(r.change_integral, 0.5 * r.xi);
  EXPECT_LT(r.change_integral, 2.0 * r.xi);
  // P-linearity and multipliers in the matrix mode
  GWPoint doubled = pt;
  for (auto& p : doubled.P) p = 2.0 * p;
  const auto dq = lambda_derivative(pt.Q, g);
  double pq = 0.0;
  for (int i = 0; i < g.points; ++i) pq += contract(pt.P[i], dq[i]) * g.spacing();
  EXPECT_NEAR(hamiltonian_eval(doubled, s) - hamiltonian_eval(pt, s), pq, 1e-10 * (1.0 + std::abs(pq)));
  const std::vector<MatrixField> zero(g.points, MatrixField(s.gw.spec));
  EXPECT_NEAR(total_hamiltonian(pt, zero, MatrixField(s.gw.spec), s), hamiltonian_eval(pt, s), 1e-12);
}

TEST(GWMode, ModeMismatch) {
  const LambdaGrid g{2.0, 64};
  const auto pt = static_gw_point(g, gw_spec(0.25));
  EXPECT_THROW(hamiltonian_eval(pt, toy(1.0, 0.0, 0.0, 0.25)), ShapeError);
  EXPECT_THROW(hamiltonian_eval(toy_point(g, [](double) { return 0.0; }), gw_spec(0.25)), ShapeError);
}
