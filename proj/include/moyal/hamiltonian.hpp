#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include "moyal/fft.hpp"
#include "moyal/gw_model.hpp"
#include "moyal/mollifier.hpp"

namespace moyal {

// Periodic window [−Λ, Λ) sampled at K points; node K/2 is λ = 0.
struct LambdaGrid {
  double extent = 2.0 * std::numbers::pi;
  int points = 128;

  void validate() const {
    if (!(extent > 0.0)) throw DomainError("lambda extent must be positive");
    if (points < 64) throw DomainError("lambda grid needs at least 64 points");
    if (points % 2 != 0) throw DomainError("lambda grid needs an even number of points");
  }
  double spacing() const { return 2.0 * extent / points; }
  double node(int i) const { return -extent + i * spacing(); }
  int zero_index() const { return points / 2; }
};

enum class Mode { toy, gw };

// toy: 𝓛 = ½Q'² − ½m²Q² − g Q(λ)Q(λ+ρ); gw: 𝓛 = (σ/2)⟨Q', Q'⟩ + S_GW[Q(λ)].
struct NonlocalLagrangianSpec {
  Mode mode = Mode::toy;
  double mass = 1.0;
  double coupling = 0.0;
  double delay = 0.0;
  GWParams gw;
  double h = 0.2;

  void validate(const LambdaGrid& g) const {
    g.validate();
    if (!(h > 0.0 && h < 1.0)) throw DomainError("mollifier scale h must lie in (0, 1)");
    require_resolution(g.spacing(), h);
    if (std::abs(delay) + h >= g.extent) throw DomainError("delay does not fit inside the lambda window");
    if (mode == Mode::gw) gw.validate();
  }
};

template <class V>
struct PhasePoint {
  LambdaGrid grid;
  std::vector<V> Q, P;
  double t = 0.0;

  void check() const {
    grid.validate();
    if (static_cast<int>(Q.size()) != grid.points || Q.size() != P.size())
      throw ShapeError("phase point fields must have one sample per lambda node");
    if constexpr (std::is_same_v<V, MatrixField>) {
      for (std::size_t i = 0; i < Q.size(); ++i) {
        require_same(Q[i].spec, Q.front().spec);
        require_same(P[i].spec, Q.front().spec);
        if (!Q[i].is_hermitian(1e-10)) throw DomainError("GW slices of Q must be Hermitian");
      }
    }
  }
};

using ToyPoint = PhasePoint<double>;
using GWPoint = PhasePoint<MatrixField>;

namespace detail {

template <class V>
int slice_width(const V& v) {
  if constexpr (std::is_same_v<V, double>) return 1;
  else return static_cast<int>(v.coeff.size());
}

template <class V>
std::vector<cplx> to_block(const std::vector<V>& f) {
  const int k = static_cast<int>(f.size()), n = slice_width(f.front());
  std::vector<cplx> b(static_cast<std::size_t>(k) * n);
  for (int i = 0; i < k; ++i) {
    if constexpr (std::is_same_v<V, double>) b[i] = f[i];
    else
      for (int j = 0; j < n; ++j) b[static_cast<std::size_t>(i) * n + j] = f[i].coeff.data()[j];
  }
  return b;
}

template <class V>
std::vector<V> from_block(const std::vector<cplx>& b, const std::vector<V>& like) {
  std::vector<V> f = like;
  const int n = slice_width(like.front());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if constexpr (std::is_same_v<V, double>) f[i] = b[i].real();
    else
      for (int j = 0; j < n; ++j) f[i].coeff.data()[j] = b[i * n + j];
  }
  return f;
}

// Applies a multiplier per λ frequency; the Nyquist bin gets a separate real factor.
template <class V, class Fn>
std::vector<V> spectral_apply(const std::vector<V>& f, const LambdaGrid& g, Fn mult, cplx nyquist) {
  const int k = g.points, n = slice_width(f.front());
  std::vector<cplx> b = to_block(f);
  const std::vector<int> shape{k, n};
  fft::along_axis(b, shape, 0, fft::Direction::forward);
  for (int i = 0; i < k; ++i) {
    const cplx m = ((i == k / 2) ? nyquist : mult(std::numbers::pi * fft::signed_bin(i, k) / g.extent)) / double(k);
    for (int j = 0; j < n; ++j) b[static_cast<std::size_t>(i) * n + j] *= m;
  }
  fft::along_axis(b, shape, 0, fft::Direction::backward);
  return from_block(b, f);
}

template <class V>
V zero_like(const V& v) {
  if constexpr (std::is_same_v<V, double>) return 0.0;
  else return MatrixField(v.spec);
}

template <class V>
double inner(const V& a, const V& b) {
  if constexpr (std::is_same_v<V, double>) return a * b;
  else return contract(a, b);
}

template <class V>
double sq_norm(const V& a) {
  if constexpr (std::is_same_v<V, double>) return a * a;
  else return a.coeff.squaredNorm();
}

}  // namespace detail

// Q(λ + s) on the periodic window; an integer number of cells is an exact roll.
template <class V>
std::vector<V> lambda_shift(const std::vector<V>& f, const LambdaGrid& g, double s) {
  const double cells = s / g.spacing();
  const double r = std::round(cells);
  if (std::abs(cells - r) < 1e-9) {
    const int k = g.points;
    const int m = ((static_cast<int>(r) % k) + k) % k;
    std::vector<V> out = f;
    for (int i = 0; i < k; ++i) out[i] = f[(i + m) % k];
    return out;
  }
  const double kn = std::numbers::pi * (g.points / 2) / g.extent;
  return detail::spectral_apply(f, g, [s](double kk) { return std::exp(cplx(0.0, kk * s)); }, std::cos(kn * s));
}

template <class V>
std::vector<V> lambda_derivative(const std::vector<V>& f, const LambdaGrid& g, int order = 1) {
  return detail::spectral_apply(f, g, [order](double kk) { return std::pow(cplx(0.0, kk), order); }, 0.0);
}

template <class V>
double field_norm(const std::vector<V>& f, const LambdaGrid& g) {
  double s = 0.0;
  for (const auto& v : f) s += detail::sq_norm(v);
  return std::sqrt(s * g.spacing());
}

inline double field_norm(const MatrixField& v) { return v.norm(); }
inline double field_norm(double v) { return std::abs(v); }

namespace detail {

inline void check_mode(const ToyPoint&, const NonlocalLagrangianSpec& s) {
  if (s.mode != Mode::toy) throw ShapeError("scalar phase points need the toy mode");
}
inline void check_mode(const GWPoint& pt, const NonlocalLagrangianSpec& s) {
  if (s.mode != Mode::gw) throw ShapeError("matrix phase points need the gw mode");
  require_same(pt.Q.front().spec, s.gw.spec);
}

template <class V>
void prepare(const PhasePoint<V>& pt, const NonlocalLagrangianSpec& s) {
  pt.check();
  s.validate(pt.grid);
  check_mode(pt, s);
}

inline double kinetic_sign(Mode m) { return m == Mode::gw ? kContractionSign : 1.0; }

// Discrete δ: ω_h(λ_i)Δλ scaled to unit mass.
inline std::vector<double> delta_weights(const LambdaGrid& g, double h) {
  std::vector<double> w(g.points);
  double total = 0.0;
  for (int i = 0; i < g.points; ++i) total += (w[i] = omega_h(g.node(i), h) * g.spacing());
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace detail

// 𝓛(λ_i) per node.
template <class V>
std::vector<double> lagrangian_slices(const PhasePoint<V>& pt, const NonlocalLagrangianSpec& s) {
  detail::prepare(pt, s);
  const auto dq = lambda_derivative(pt.Q, pt.grid);
  std::vector<double> l(pt.Q.size());
  if constexpr (std::is_same_v<V, double>) {
    const auto qr = lambda_shift(pt.Q, pt.grid, s.delay);
    for (std::size_t i = 0; i < l.size(); ++i)
      l[i] = 0.5 * dq[i] * dq[i] - 0.5 * s.mass * s.mass * pt.Q[i] * pt.Q[i] - s.coupling * pt.Q[i] * qr[i];
  } else {
    for (std::size_t i = 0; i < l.size(); ++i)
      l[i] = 0.5 * kContractionSign * contract(dq[i], dq[i]) + action(pt.Q[i], s.gw);
  }
  return l;
}

// L̃ = ∫ ω_h(λ) 𝓛(λ) dλ.
template <class V>
double mollified_lagrangian(const PhasePoint<V>& pt, const NonlocalLagrangianSpec& s) {
  const auto l = lagrangian_slices(pt, s);
  const auto w = detail::delta_weights(pt.grid, s.h);
  double sum = 0.0;
  for (int i = 0; i < pt.grid.points; ++i)
    if (w[i] != 0.0) sum += w[i] * l[i];
  return sum;
}

// H = ∫ P Q' dλ − L̃.
template <class V>
double hamiltonian_eval(const PhasePoint<V>& pt, const NonlocalLagrangianSpec& s) {
  const double lt = mollified_lagrangian(pt, s);
  const auto dq = lambda_derivative(pt.Q, pt.grid);
  double pq = 0.0;
  for (std::size_t i = 0; i < dq.size(); ++i) pq += detail::inner(pt.P[i], dq[i]);
  return pq * pt.grid.spacing() - lt;
}

// Euler-Lagrange density E(λ): toy −Q'' − m²Q − g(Q(λ+ρ) + Q(λ−ρ)); gw −σQ'' + R(Q(λ)).
template <class V>
std::vector<V> euler_lagrange(const PhasePoint<V>& pt, const NonlocalLagrangianSpec& s) {
  detail::prepare(pt, s);
  const auto d2 = lambda_derivative(pt.Q, pt.grid, 2);
  std::vector<V> e(pt.Q.size(), detail::zero_like(pt.Q.front()));
  if constexpr (std::is_same_v<V, double>) {
    const auto qp = lambda_shift(pt.Q, pt.grid, s.delay), qm = lambda_shift(pt.Q, pt.grid, -s.delay);
    for (std::size_t i = 0; i < e.size(); ++i)
      e[i] = -d2[i] - s.mass * s.mass * pt.Q[i] - s.coupling * (qp[i] + qm[i]);
  } else {
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = (-kContractionSign) * d2[i] + eom_residual(pt.Q[i], s.gw).value;
  }
  return e;
}

// δL̃/δQ(λ): toy −(ω_hQ')' − m²ω_hQ − g(ω_h Q(λ+ρ) + ω_h(λ−ρ)Q(λ−ρ)); gw −σ(ω_hQ')' + ω_h R(Q).
template <class V>
std::vector<V> functional_derivative(const PhasePoint<V>& pt, const NonlocalLagrangianSpec& s) {
  detail::prepare(pt, s);
  const LambdaGrid& g = pt.grid;
  const double kappa = detail::kinetic_sign(s.mode);
  auto wq = lambda_derivative(pt.Q, g);
  for (int i = 0; i < g.points; ++i) wq[i] = omega_h(g.node(i), s.h) * wq[i];
  const auto dwq = lambda_derivative(wq, g);
  std::vector<V> out(pt.Q.size(), detail::zero_like(pt.Q.front()));
  if constexpr (std::is_same_v<V, double>) {
    const auto qp = lambda_shift(pt.Q, g, s.delay), qm = lambda_shift(pt.Q, g, -s.delay);
    for (int i = 0; i < g.points; ++i) {
      const double w = omega_h(g.node(i), s.h), wm = omega_h(g.node(i) - s.delay, s.h);
      out[i] = -dwq[i] - s.mass * s.mass * w * pt.Q[i] - s.coupling * (w * qp[i] + wm * qm[i]);
    }
  } else {
    for (int i = 0; i < g.points; ++i) {
      out[i] = (-kappa) * dwq[i];
      const double w = omega_h(g.node(i), s.h);
      if (w != 0.0) out[i] = out[i] + w * eom_residual(pt.Q[i], s.gw).value;
    }
  }
  return out;
}

// Momentum on the primary constraint surface: toy ω_hQ' − g(ε_h(λ) − ε_h(λ−ρ))/2 Q(λ−ρ); gw σω_hQ'.
template <class V>
std::vector<V> constraint_momentum(const std::vector<V>& q, const LambdaGrid& g, const NonlocalLagrangianSpec& s) {
  const double kappa = detail::kinetic_sign(s.mode);
  auto out = lambda_derivative(q, g);
  for (int i = 0; i < g.points; ++i) out[i] = (kappa * omega_h(g.node(i), s.h)) * out[i];
  if constexpr (std::is_same_v<V, double>) {
    if (s.coupling != 0.0) {
      const auto qm = lambda_shift(q, g, -s.delay);
      for (int i = 0; i < g.points; ++i) {
        const double l = g.node(i);
        out[i] -= s.coupling * 0.5 * (eps_h(l, s.h) - eps_h(l - s.delay, s.h)) * qm[i];
      }
    }
  }
  return out;
}

// Γ_h = P − ∫dσ (δ𝓛_h(σ)/δQ(λ)) (ε_h(λ) − ε_h(σ))/2.
template <class V>
std::vector<V> primary_constraint(const PhasePoint<V>& pt, const NonlocalLagrangianSpec& s) {
  detail::prepare(pt, s);
  const auto pi = constraint_momentum(pt.Q, pt.grid, s);
  std::vector<V> out = pt.P;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] - pi[i];
  return out;
}

// Ξ_h = ∫ ω_h(λ) E(λ) dλ: the mollified equation of motion at λ = 0.
template <class V>
V secondary_constraint(const PhasePoint<V>& pt, const NonlocalLagrangianSpec& s) {
  const auto e = euler_lagrange(pt, s);
  const auto w = detail::delta_weights(pt.grid, s.h);
  V xi = detail::zero_like(pt.Q.front());
  for (int i = 0; i < pt.grid.points; ++i)
    if (w[i] != 0.0) xi = xi + w[i] * e[i];
  return xi;
}

// Q̇ = Q', Ṗ = P' + δL̃/δQ. Q is transported exactly; the source is integrated
// along characteristics with the kernel factors in closed form.
template <class V>
PhasePoint<V> evolve(const PhasePoint<V>& pt, double dt, const NonlocalLagrangianSpec& s) {
  detail::prepare(pt, s);
  const LambdaGrid& g = pt.grid;
  if (std::abs(dt) >= g.extent) throw RangeError("time step shifts beyond the lambda window");
  PhasePoint<V> out = pt;
  out.t = pt.t + dt;
  if (dt == 0.0) return out;
  out.Q = lambda_shift(pt.Q, g, dt);
  out.P = lambda_shift(pt.P, g, dt);
  const double kappa = detail::kinetic_sign(s.mode);
  const auto d1 = lambda_derivative(out.Q, g);
  const auto d2 = lambda_derivative(out.Q, g, 2);
  std::vector<V> qp, qm;
  if constexpr (std::is_same_v<V, double>) {
    qp = lambda_shift(out.Q, g, s.delay);
    qm = lambda_shift(out.Q, g, -s.delay);
  }
  for (int i = 0; i < g.points; ++i) {
    const double l = g.node(i);
    const double dw = omega_h(l + dt, s.h) - omega_h(l, s.h);
    const double de = 0.5 * (eps_h(l + dt, s.h) - eps_h(l, s.h));
    if constexpr (std::is_same_v<V, double>) {
      const double der = 0.5 * (eps_h(l + dt - s.delay, s.h) - eps_h(l - s.delay, s.h));
      out.P[i] += -dw * d1[i] - de * (d2[i] + s.mass * s.mass * out.Q[i] + s.coupling * qp[i]) -
                  s.coupling * der * qm[i];
    } else {
      V src = (-kappa * dw) * d1[i] + (-kappa * de) * d2[i];
      if (de != 0.0) src = src + de * eom_residual(out.Q[i], s.gw).value;
      out.P[i] = out.P[i] + src;
    }
  }
  return out;
}

struct StabilityReport {
  double defect = 0.0;       // ‖Γ(t+dt) − Γ(t, ·+dt) − predicted‖
  double transported = 0.0;  // ‖Γ(t+dt) − Γ(t, ·+dt)‖
  double predicted = 0.0;    // ‖E(t, λ+dt)(ε_h(λ+dt) − ε_h(λ))/2‖
  double change_integral = 0.0;  // |∫(Γ(t+dt) − Γ(t, ·+dt)) dλ| / dt (norm for matrix slices)
  double off_surface = 0.0;  // ‖Γ(t)‖
  double xi = 0.0;           // ‖Ξ(t)‖
  bool on_surface = true;
};

template <class V>
StabilityReport constraint_stability_check(const PhasePoint<V>& pt, const NonlocalLagrangianSpec& s, double dt,
                                           double surface_tol = 1e-6) {
  if (dt == 0.0) throw DomainError("stability check needs a nonzero step");
  const LambdaGrid& g = pt.grid;
  const auto g0 = primary_constraint(pt, s);
  const auto e = euler_lagrange(pt, s);
  const auto g1 = primary_constraint(evolve(pt, dt, s), s);
  const auto g0s = lambda_shift(g0, g, dt);
  const auto es = lambda_shift(e, g, dt);
  StabilityReport r;
  r.off_surface = field_norm(g0, g);
  r.on_surface = r.off_surface <= surface_tol;
  r.xi = field_norm(secondary_constraint(pt, s));
  std::vector<V> change = g1, pred = g1, defect = g1;
  V total = detail::zero_like(pt.Q.front());
  for (int i = 0; i < g.points; ++i) {
    const double l = g.node(i);
    change[i] = g1[i] - g0s[i];
    pred[i] = (0.5 * (eps_h(l + dt, s.h) - eps_h(l, s.h))) * es[i];
    defect[i] = change[i] - pred[i];
    total = total + g.spacing() * change[i];
  }
  r.transported = field_norm(change, g);
  r.predicted = field_norm(pred, g);
  r.defect = field_norm(defect, g);
  r.change_integral = field_norm(total) / std::abs(dt);
  return r;
}

// H_T = H + ∫Λ¹Γ_h + Λ²·Ξ_h (trace pairing per slice in gw mode).
template <class V>
double total_hamiltonian(const PhasePoint<V>& pt, const std::vector<V>& lambda1, const V& lambda2,
                         const NonlocalLagrangianSpec& s) {
  if (lambda1.size() != pt.Q.size()) throw ShapeError("first multiplier must match the primary constraint");
  const auto gam = primary_constraint(pt, s);
  const V xi = secondary_constraint(pt, s);
  if constexpr (std::is_same_v<V, MatrixField>) {
    for (const auto& m : lambda1) require_same(m.spec, xi.spec);
    require_same(lambda2.spec, xi.spec);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < gam.size(); ++i) sum += detail::inner(lambda1[i], gam[i]);
  return hamiltonian_eval(pt, s) + sum * pt.grid.spacing() + detail::inner(lambda2, xi);
}

struct BracketReport {
  double two_sided = 0.0;    // max |(W Wᵀ)/Δλ − ω_h∗ω_h|
  double one_sided = 0.0;    // max |W/Δλ − ω_h|
  double diagonal = 0.0;     // (W Wᵀ)_{00}/Δλ
  double far_field = 0.0;    // max |bracket| for |λ − λ'| > 2h
  double antisymmetry = 0.0; // max |{Q,P} + {P,Q}|
};

namespace detail {

// (ω_h∗ω_h)(d) by composite Gauss-Legendre over the support overlap.
inline double kernel_square(double d, double h) {
  const double a = std::max(-h, d - h), b = std::min(h, d + h);
  if (b <= a) return 0.0;
  return composite_gauss([&](double m) { return omega_h(d - m, h) * omega_h(m, h); }, a, b, 32);
}

inline double periodic_distance(double d, double extent) {
  const double period = 2.0 * extent;
  d = std::fmod(d, period);
  if (d >= extent) d -= period;
  if (d < -extent) d += period;
  return d;
}

}  // namespace detail

// {Q_h(λ), P_h(λ')} for Q_h = W q, P_h = W p with {q_i, p_j} = δ_ij/Δλ.
inline BracketReport poisson_bracket_check(const LambdaGrid& g, double h) {
  g.validate();
  if (!(h > 0.0 && h < 1.0)) throw DomainError("mollifier scale h must lie in (0, 1)");
  require_resolution(g.spacing(), h);
  const int k = g.points;
  const double dl = g.spacing();
  Eigen::MatrixXd w(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) w(i, j) = omega_h(detail::periodic_distance(g.node(i) - g.node(j), g.extent), h) * dl;
    w.row(i) /= w.row(i).sum();
  }
  const Eigen::MatrixXd qp = w * w.transpose() / dl;
  const Eigen::MatrixXd pq = -(w * w.transpose()).transpose() / dl;
  BracketReport r;
  r.diagonal = qp(g.zero_index(), g.zero_index());
  r.antisymmetry = (qp + pq.transpose()).cwiseAbs().maxCoeff();
  std::vector<double> square(k), single(k);
  for (int o = 0; o < k; ++o) {
    const double d = detail::periodic_distance(o * dl, g.extent);
    square[o] = detail::kernel_square(d, h);
    single[o] = omega_h(d, h);
  }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const int o = ((i - j) % k + k) % k;
      const double d = detail::periodic_distance(o * dl, g.extent);
      r.two_sided = std::max(r.two_sided, std::abs(qp(i, j) - square[o]));
      r.one_sided = std::max(r.one_sided, std::abs(w(i, j) / dl - single[o]));
      if (std::abs(d) > 2.0 * h) r.far_field = std::max(r.far_field, std::abs(qp(i, j)));
    }
  return r;
}

struct TrajectoryRow {
  double t = 0.0;
  double q0 = 0.0;
  double gamma = 0.0;
  double xi = 0.0;
  double energy = 0.0;
};

inline void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << std::setprecision(17) << "t,q0,gamma_norm,xi_norm,hamiltonian\n";
  for (const auto& r : rows) os << r.t << ',' << r.q0 << ',' << r.gamma << ',' << r.xi << ',' << r.energy << '\n';
}

}  // namespace moyal
