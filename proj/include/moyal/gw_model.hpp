#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "moyal/algebra.hpp"
#include "moyal/grid.hpp"

namespace moyal {

struct GWParams {
  double theta = 2.0;
  double omega = 1.0;
  double msq = 0.0;
  double lambda = 1.0;
  AlgebraSpec spec{2.0, 2, 8};

  void validate() const {
    spec.validate();
    if (!(theta > 0.0)) throw DomainError("theta must be positive");
    if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
    if (omega < 0.0) throw DomainError("omega must be non-negative");
    if (msq < 0.0) throw DomainError("msq must be non-negative");
    if (spec.theta != theta) throw DomainError("spec.theta differs from theta");
  }

  GWParams with(double om, double m2, double lam) const {
    GWParams q = *this;
    q.omega = om;
    q.msq = m2;
    q.lambda = lam;
    return q;
  }
};

struct EomResidual {
  MatrixField value;
  double norm = 0.0;
};

// Integrated terms of the action, couplings stripped, adjoint contractions.
struct ActionTerms {
  double kinetic = 0.0;   // Σ_μ ∫ (∂_μφ)†⋆∂_μφ
  double harmonic = 0.0;  // Σ_μ ∫ (½{x̃_μ,φ})†⋆½{x̃_μ,φ}
  double mass = 0.0;      // ∫ φ†⋆φ
  double quartic = 0.0;   // ∫ (φ†⋆φ)⋆(φ†⋆φ)

  double combine(const GWParams& p) const {
    const double s = kContractionSign;
    return 0.5 * s * kinetic + 0.5 * s * p.omega * p.omega * harmonic + 0.5 * p.msq * mass +
           p.lambda / 24.0 * quartic;
  }
};

inline ActionTerms action_terms(const MatrixField& phi) {
  phi.check();
  const MatrixField f = with_trunc(phi, phi.spec.trunc + 2);
  const AlgebraSpec& s = f.spec;
  const double vol = s.volume();
  auto dot = [&](const Matrix& a, const Matrix& b) { return vol * (a.adjoint() * b).trace().real(); };
  ActionTerms t;
  for (int mu = 0; mu < s.dim; ++mu) {
    const Matrix d = partial(f, mu).coeff;
    const Matrix x = xtilde_matrix(s, mu);
    const Matrix y = 0.5 * (x * f.coeff + f.coeff * x);
    t.kinetic += dot(d, d);
    t.harmonic += dot(y, y);
  }
  t.mass = dot(f.coeff, f.coeff);
  const Matrix sq = f.coeff.adjoint() * f.coeff;
  t.quartic = dot(sq, sq);
  return t;
}

inline double action(const MatrixField& phi, const GWParams& p) {
  p.validate();
  require_same(phi.spec, p.spec);
  if (!phi.is_hermitian()) throw DomainError("action requires a Hermitian (real) field");
  return action_terms(phi).combine(p);
}

// Same functional for arbitrary complex coefficients (equals action() on Hermitian input).
inline double action_adjoint_form(const MatrixField& phi, const GWParams& p) {
  require_same(phi.spec, p.spec);
  return action_terms(phi).combine(p);
}

inline EomResidual eom_residual(const MatrixField& phi, const GWParams& p) {
  p.validate();
  require_same(phi.spec, p.spec);
  const double s = kContractionSign;
  const double w2 = p.omega * p.omega;
  // true contractions Σ x̃_μ⋆x̃_μ⋆φ etc. are the negatives of the xtilde_* operators
  const MatrixField sql = -1.0 * xtilde_square_left(phi);
  const MatrixField sqr = -1.0 * xtilde_square_right(phi);
  const MatrixField sand = -1.0 * xtilde_sandwich(phi);
  const MatrixField lap = -0.25 * (sql + sqr - 2.0 * sand);
  EomResidual r;
  r.value = (-s) * lap + (0.25 * w2 * s) * (2.0 * sand + sql + sqr) + p.msq * phi;
  r.value.coeff += (p.lambda / 6.0) * phi.coeff * phi.coeff * phi.coeff;
  r.norm = r.value.norm();
  return r;
}

// ⟨η, R⟩ = (2πθ)^{D/2} Re tr(η R): the directional derivative of the action.
inline double contract(const MatrixField& eta, const MatrixField& r) {
  return eta.spec.volume() * (eta.coeff * r.coeff).trace().real();
}

struct MotionCoefficients {
  std::vector<double> lower;  // per pair, multiplies b_{k−e_i, l−e_i}
  std::vector<double> upper;  // per pair, multiplies b_{k+e_i, l+e_i}
  double diagonal = 0.0;
};

inline MotionCoefficients eom_matrix_coefficients(int k, int l, const GWParams& p, double tau) {
  p.validate();
  const AlgebraSpec& s = p.spec;
  if (k < 0 || l < 0 || k >= s.size() || l >= s.size()) throw RangeError("cell index out of range");
  const double w2 = p.omega * p.omega;
  MotionCoefficients c;
  for (int i = 0; i < s.pairs(); ++i) {
    const double ki = s.component(k, i), li = s.component(l, i);
    c.lower.push_back(-(2.0 / p.theta) * (w2 - 1.0) * std::sqrt(ki * li));
    c.upper.push_back(-(2.0 / p.theta) * (w2 - 1.0) * std::sqrt((ki + 1.0) * (li + 1.0)));
  }
  c.diagonal = -(2.0 / p.theta) * (w2 + 1.0) * (s.norm(k) + s.norm(l) + 0.5 * s.dim) + p.msq;
  if (k == l) c.diagonal += p.lambda / 6.0 * tau * tau;
  return c;
}

inline double tau_bound(int k, int l, const GWParams& p) {
  return 4.0 / p.theta * (p.spec.norm(k) + p.spec.norm(l) + 0.5 * p.spec.dim);
}

inline double solve_tau(int k, int l, const GWParams& p) {
  p.validate();
  if (k < 0 || l < 0 || k >= p.spec.size() || l >= p.spec.size()) throw RangeError("cell index out of range");
  if (std::abs(p.omega - 1.0) > 1e-12) throw UnsupportedRegime("the single-cell solution needs omega = 1");
  if (k != l) throw DomainError("the single-cell ansatz closes only on diagonal cells (k == l)");
  const double bound = tau_bound(k, l, p);
  if (bound < p.msq) {
    std::ostringstream os;
    os << "need (4/theta)(|k|+|l|+D/2) >= m^2, got " << bound << " < " << p.msq;
    throw DomainError(os.str());
  }
  return std::sqrt(6.0 / p.lambda) * std::sqrt(bound - p.msq);
}

// π^ν = Ω²(2 φ⋆x̃^ν⋆φ + x̃^ν⋆φ⋆φ + φ⋆φ⋆x̃^ν), one field per direction ν.
inline std::vector<MatrixField> xtilde_constraint(const MatrixField& phi, const GWParams& p) {
  p.validate();
  require_same(phi.spec, p.spec);
  if (!phi.is_hermitian()) throw DomainError("xtilde_constraint requires a Hermitian field");
  std::vector<MatrixField> out;
  const Matrix f2 = phi.coeff * phi.coeff;
  for (int nu = 0; nu < p.spec.dim; ++nu) {
    const Matrix x = kContractionSign * xtilde_matrix(p.spec, nu);
    out.emplace_back(p.spec, p.omega * p.omega * (2.0 * phi.coeff * x * phi.coeff + x * f2 + f2 * x));
  }
  return out;
}

// Langmann-Szabo map in the matrix base: parity (−1)^{|k|} on the left index.
inline MatrixField duality_map(const MatrixField& phi) { return left_parity(phi); }

inline double ls_duality_gap(const MatrixField& phi, const GWParams& p) {
  p.validate();
  if (!(p.omega > 0.0)) throw DomainError("duality gap needs omega > 0");
  const double w = p.omega;
  const double lhs = action_adjoint_form(duality_map(phi), p);
  const double rhs = w * w * action_adjoint_form(phi, p.with(1.0 / w, p.msq / (w * w), p.lambda / (w * w)));
  return std::abs(lhs - rhs) / (1.0 + std::abs(action_adjoint_form(phi, p)));
}

// Grid realization of the same functional; x̃ may be co-translated by an offset.
inline double action_grid(const GridField& phi, const GWParams& p, const std::array<double, 4>& xtilde_offset = {}) {
  p.validate();
  const GridSpec& g = phi.spec;
  if (g.dim != p.spec.dim) throw ShapeError("grid and algebra dimensions differ");
  double kin = 0.0, har = 0.0, mass = 0.0;
  for (int mu = 0; mu < g.dim; ++mu) {
    const GridField d = spectral_derivative(phi, mu);
    for (const auto& v : d.values) kin += std::norm(v);
  }
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const auto idx = phi.index(i);
    for (int pr = 0; pr < g.dim / 2; ++pr) {
      const double x0 = g.node(idx[2 * pr]), x1 = g.node(idx[2 * pr + 1]);
      const double t0 = -2.0 * x1 / p.theta + xtilde_offset[2 * pr];
      const double t1 = 2.0 * x0 / p.theta + xtilde_offset[2 * pr + 1];
      har += (t0 * t0 + t1 * t1) * std::norm(phi[i]);
    }
    mass += std::norm(phi[i]);
  }
  GridField conj_phi = phi;
  for (auto& v : conj_phi.values) v = std::conj(v);
  const GridField sq = star_grid(conj_phi, phi, p.theta);
  double quartic = 0.0;
  for (const auto& v : sq.values) quartic += std::norm(v);
  const double dv = g.cell_volume();
  ActionTerms t{kin * dv, har * dv, mass * dv, quartic * dv};
  return t.combine(p);
}

inline double ls_duality_gap_grid(const GridField& phi, const GWParams& p) {
  p.validate();
  if (!(p.omega > 0.0)) throw DomainError("duality gap needs omega > 0");
  const double w = p.omega;
  const double lhs = action_grid(duality_map_grid(phi, p.theta), p);
  const double rhs = w * w * action_grid(phi, p.with(1.0 / w, p.msq / (w * w), p.lambda / (w * w)));
  return std::abs(lhs - rhs) / (1.0 + std::abs(action_grid(phi, p)));
}

}  // namespace moyal
