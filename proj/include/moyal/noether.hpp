#pragma once

#include <array>
#include <fstream>
#include <iomanip>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "moyal/gw_model.hpp"

namespace moyal {

// Extra oscillator levels added before building tensors so no product is clipped.
inline constexpr int kTensorPadding = 4;

struct TensorField {
  int dim = 2;
  int rank = 2;
  std::vector<MatrixField> components;

  TensorField() = default;
  TensorField(const AlgebraSpec& s, int r) : dim(s.dim), rank(r) {
    std::size_t n = 1;
    for (int i = 0; i < r; ++i) n *= static_cast<std::size_t>(s.dim);
    components.assign(n, MatrixField(s));
  }

  MatrixField& at(int a, int b) { return components[static_cast<std::size_t>(a * dim + b)]; }
  const MatrixField& at(int a, int b) const { return components[static_cast<std::size_t>(a * dim + b)]; }
  MatrixField& at(int a, int b, int c) { return components[static_cast<std::size_t>((a * dim + b) * dim + c)]; }
  const MatrixField& at(int a, int b, int c) const {
    return components[static_cast<std::size_t>((a * dim + b) * dim + c)];
  }
  const AlgebraSpec& spec() const { return components.front().spec; }
};

using Rotation = Eigen::MatrixXd;

struct GeneratorSpec {
  Rotation omega;
  std::vector<double> eps;
  std::optional<MatrixField> calX;
  std::optional<MatrixField> xi;

  void validate(int dim) const {
    if (omega.rows() != dim || omega.cols() != dim) throw ShapeError("omega must be D x D");
    if ((omega + omega.transpose()).cwiseAbs().maxCoeff() != 0.0) throw DomainError("omega must be antisymmetric");
    if (static_cast<int>(eps.size()) != dim) throw ShapeError("eps must have D entries");
  }
};

// ϖ_a δx^ν/δϖ_a (one field per ν) and ϖ_a δF/δϖ_a.
struct GeneratorFields {
  std::vector<MatrixField> dx;
  MatrixField dF;
};

namespace detail {

inline GWParams padded(const GWParams& p, int extra) {
  GWParams q = p;
  q.spec.trunc += extra;
  return q;
}

inline Matrix anti(const Matrix& a, const Matrix& b) { return a * b + b * a; }
inline Matrix comm(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline void require_rotation(const Rotation& w, int dim) {
  if (w.rows() != dim || w.cols() != dim) throw ShapeError("omega must be D x D");
  if ((w + w.transpose()).cwiseAbs().maxCoeff() != 0.0) throw DomainError("omega must be antisymmetric");
}

}  // namespace detail

// L_⋆ with the contractions of the action; ∫ L_⋆ equals action().
inline MatrixField lagrangian_density(const MatrixField& phi, const GWParams& p) {
  const double s = kContractionSign;
  const AlgebraSpec& a = phi.spec;
  MatrixField out(a);
  for (int mu = 0; mu < a.dim; ++mu) {
    const Matrix d = partial(phi, mu).coeff;
    const Matrix x = xtilde_matrix(a, mu);
    const Matrix y = 0.5 * detail::anti(x, phi.coeff);
    out.coeff += 0.5 * s * d * d + 0.5 * s * p.omega * p.omega * y * y;
  }
  const Matrix f2 = phi.coeff * phi.coeff;
  out.coeff += 0.5 * p.msq * f2 + p.lambda / 24.0 * f2 * f2;
  return out;
}

// T_ρμ = ½{∂_ρφ, ∂_μφ} − δ_ρμ L_⋆, on the algebra padded by kTensorPadding.
inline TensorField energy_momentum(const MatrixField& phi, const GWParams& p) {
  p.validate();
  require_same(phi.spec, p.spec);
  if (!phi.is_hermitian()) throw DomainError("energy_momentum requires a Hermitian field");
  const MatrixField f = with_trunc(phi, phi.spec.trunc + kTensorPadding);
  const int dim = f.spec.dim;
  std::vector<Matrix> d;
  for (int mu = 0; mu < dim; ++mu) d.push_back(partial(f, mu).coeff);
  const Matrix lag = lagrangian_density(f, p).coeff;
  TensorField t(f.spec, 2);
  for (int r = 0; r < dim; ++r)
    for (int m = r; m < dim; ++m) {
      Matrix c = 0.5 * detail::anti(d[r], d[m]);
      if (r == m) c -= lag;
      t.at(r, m).coeff = c;
      t.at(m, r).coeff = c;
    }
  return t;
}

enum class Ordering { left, symmetric };

// M_νρμ = x_ν⋆T_ρμ − x_μ⋆T_ρν (left) or with ½{x, T} (symmetric).
inline TensorField angular_momentum(const MatrixField& phi, const GWParams& p, Ordering ord = Ordering::left) {
  const TensorField t = energy_momentum(phi, p);
  const AlgebraSpec& s = t.spec();
  const int dim = s.dim;
  std::vector<Matrix> x;
  for (int nu = 0; nu < dim; ++nu) x.push_back(coordinate_matrix(s, nu));
  auto mul = [&](int nu, const Matrix& c) -> Matrix {
    return ord == Ordering::left ? Matrix(x[nu] * c) : Matrix(0.5 * detail::anti(x[nu], c));
  };
  TensorField m(s, 3);
  for (int nu = 0; nu < dim; ++nu)
    for (int rho = 0; rho < dim; ++rho)
      for (int mu = nu + 1; mu < dim; ++mu) {
        const Matrix c = mul(nu, t.at(rho, mu).coeff) - mul(mu, t.at(rho, nu).coeff);
        m.at(nu, rho, mu).coeff = c;
        m.at(mu, rho, nu).coeff = -c;
      }
  return m;
}

// ∫ of every component, (2πθ)^{D/2} tr.
inline Eigen::MatrixXcd integrate_tensor(const TensorField& t) {
  if (t.rank != 2) throw ShapeError("integrate_tensor expects a rank-2 tensor");
  Eigen::MatrixXcd out(t.dim, t.dim);
  for (int a = 0; a < t.dim; ++a)
    for (int b = 0; b < t.dim; ++b) out(a, b) = integrate_matrix(t.at(a, b));
  return out;
}

// ∫ B(ω) = −∫ ω^{μν} x_ν⋆((λ/4!)[[∂_μφ, φ], φ⋆φ] + (Ω²/8) Σ_ρ [[∂_μφ, {x̃_ρ, φ}], x̃^ρ]).
inline double breaking_term(const MatrixField& phi, const Rotation& omega, const GWParams& p) {
  p.validate();
  require_same(phi.spec, p.spec);
  if (!phi.is_hermitian()) throw DomainError("breaking_term requires a Hermitian field");
  detail::require_rotation(omega, p.spec.dim);
  const MatrixField f = with_trunc(phi, phi.spec.trunc + kTensorPadding);
  const AlgebraSpec& s = f.spec;
  const Matrix f2 = f.coeff * f.coeff;
  std::vector<Matrix> xt;
  for (int r = 0; r < s.dim; ++r) xt.push_back(xtilde_matrix(s, r));
  Matrix total = Matrix::Zero(s.size(), s.size());
  for (int mu = 0; mu < s.dim; ++mu) {
    const Matrix d = partial(f, mu).coeff;
    Matrix inner = p.lambda / 24.0 * detail::comm(detail::comm(d, f.coeff), f2);
    for (int r = 0; r < s.dim; ++r)
      inner += p.omega * p.omega / 8.0 *
               detail::comm(detail::comm(d, detail::anti(xt[r], f.coeff)), kContractionSign * xt[r]);
    for (int nu = 0; nu < s.dim; ++nu)
      if (omega(mu, nu) != 0.0) total += omega(mu, nu) * coordinate_matrix(s, nu) * inner;
  }
  return -(s.volume() * total.trace()).real();
}

struct WardTranslation {
  double divergence_integral = 0.0;
  double action_shift_gap = 0.0;
};

// divergence: ∫ ε^μ ∂^ρ T_ρμ in the matrix base; shift gap: grid action of the
// star-translated field with x̃ co-translated, against the untranslated action.
inline WardTranslation ward_translation_check(const MatrixField& phi, const std::array<double, 4>& eps,
                                              const GWParams& p, const GridSpec& grid) {
  const TensorField t = energy_momentum(phi, p);
  const int dim = p.spec.dim;
  WardTranslation w;
  cplx div = 0.0;
  for (int mu = 0; mu < dim; ++mu) {
    if (eps[mu] == 0.0) continue;
    for (int rho = 0; rho < dim; ++rho)
      div += eps[mu] * kContractionSign * integrate_matrix(partial(t.at(rho, mu), rho));
  }
  w.divergence_integral = std::abs(div);
  bool zero = true;
  for (int mu = 0; mu < dim; ++mu) zero = zero && eps[mu] == 0.0;
  if (zero) return w;
  const GridField f = reconstruct(phi, grid);
  const GridField shifted = star_translate(f, eps, p.theta);
  std::array<double, 4> offset{};
  for (int pr = 0; pr < dim / 2; ++pr) {
    offset[2 * pr] = -2.0 * eps[2 * pr + 1] / p.theta;
    offset[2 * pr + 1] = 2.0 * eps[2 * pr] / p.theta;
  }
  w.action_shift_gap = std::abs(action_grid(shifted, p, offset) - action_grid(f, p));
  return w;
}

// m_±(ω)φ = ω^μ_ν (x^ν⋆∂_μφ) for sign > 0, (∂_μφ⋆x^ν) for sign < 0, ½{x^ν, ∂_μφ} for 0.
// ω^μ_ν is omega(μ, ν).
inline MatrixField rotation_generator(const Rotation& omega, const MatrixField& phi, int sign) {
  const AlgebraSpec& s = phi.spec;
  MatrixField out(s);
  for (int mu = 0; mu < s.dim; ++mu) {
    const Matrix d = partial(phi, mu).coeff;
    for (int nu = 0; nu < s.dim; ++nu) {
      if (omega(mu, nu) == 0.0) continue;
      const Matrix x = coordinate_matrix(s, nu);
      if (sign > 0) out.coeff += omega(mu, nu) * x * d;
      else if (sign < 0) out.coeff += omega(mu, nu) * d * x;
      else out.coeff += 0.5 * omega(mu, nu) * detail::anti(x, d);
    }
  }
  return out;
}

// (ω×ω')_ρ^ν = −(ω_μ^ν ω'^μ_ρ − ω'^ν_μ ω_ρ^μ), stored as K(ν, ρ).
inline Rotation rotation_cross(const Rotation& w, const Rotation& v) {
  const int d = static_cast<int>(w.rows());
  Rotation k = Rotation::Zero(d, d);
  for (int nu = 0; nu < d; ++nu)
    for (int rho = 0; rho < d; ++rho)
      for (int mu = 0; mu < d; ++mu) k(nu, rho) -= w(nu, mu) * v(mu, rho) - v(nu, mu) * w(mu, rho);
  return k;
}

// Ordered generators close only up to (i/2)∂ᵀ(KΘ)∂ with K = ω×ω'; Weyl order closes exactly.
struct BracketDefects {
  double rotation = 0.0;     // ‖[m(ω), m(ω')]φ − m(ω×ω')φ‖
  double ordering = 0.0;     // ‖[m(ω), m(ω')]φ − (2 m(ω×ω') − m_0(ω×ω'))φ‖
  double translation = 0.0;  // max_μ ‖[p_μ, m(ω)]φ − ω^ν_μ p_νφ‖
  double cross = 0.0;        // index formula vs ω'ω − ωω', plus antisymmetry
};

inline BracketDefects generator_bracket_check(const Rotation& w, const Rotation& v, const MatrixField& phi,
                                              int sign) {
  const int dim = phi.spec.dim;
  detail::require_rotation(w, dim);
  detail::require_rotation(v, dim);
  // two generator applications raise the support by four levels; keep two spare
  const int keep = phi.spec.trunc + 4;
  const MatrixField f = with_trunc(phi, keep + 2);
  auto crop = [&](const MatrixField& m) { return with_trunc(m, keep).norm(); };
  BracketDefects out;
  const Rotation k = rotation_cross(w, v);
  out.cross = std::max((k - (v * w - w * v)).cwiseAbs().maxCoeff(), (k + k.transpose()).cwiseAbs().maxCoeff());
  const MatrixField lhs = rotation_generator(w, rotation_generator(v, f, sign), sign) -
                          rotation_generator(v, rotation_generator(w, f, sign), sign);
  const MatrixField mk = rotation_generator(k, f, sign);
  out.rotation = crop(lhs - mk);
  out.ordering = crop(lhs - (2.0 * mk - rotation_generator(k, f, 0)));
  for (int mu = 0; mu < dim; ++mu) {
    MatrixField d = partial(rotation_generator(w, f, sign), mu) - rotation_generator(w, partial(f, mu), sign);
    for (int nu = 0; nu < dim; ++nu) d -= w(nu, mu) * partial(f, nu);
    out.translation = std::max(out.translation, crop(d));
  }
  return out;
}

// Generator fields on the padded algebra of phi.
inline GeneratorFields generator_fields(const GeneratorSpec& gen, const MatrixField& phi) {
  const int dim = phi.spec.dim;
  gen.validate(dim);
  const MatrixField f = with_trunc(phi, phi.spec.trunc + kTensorPadding);
  const AlgebraSpec& s = f.spec;
  GeneratorFields g{std::vector<MatrixField>(dim, MatrixField(s)), MatrixField(s)};
  for (int nu = 0; nu < dim; ++nu) {
    g.dx[nu].coeff = gen.eps[nu] * Matrix::Identity(s.size(), s.size());
    for (int k = 0; k < dim; ++k)
      if (gen.omega(nu, k) != 0.0) g.dx[nu].coeff += gen.omega(nu, k) * coordinate_matrix(s, k);
  }
  for (int mu = 0; mu < dim; ++mu) {
    const Matrix d = partial(f, mu).coeff;
    for (int nu = 0; nu < dim; ++nu)
      if (gen.omega(mu, nu) != 0.0) g.dF.coeff -= gen.omega(mu, nu) * 0.5 * detail::anti(coordinate_matrix(s, nu), d);
  }
  return g;
}

// J_μ = ½ Σ_ν {δx^ν, T_μν} − ½ {δF, ∂^μφ}.
inline std::vector<MatrixField> noether_current(const MatrixField& phi, const GeneratorFields& gen,
                                                const GWParams& p) {
  const TensorField t = energy_momentum(phi, p);
  const AlgebraSpec& s = t.spec();
  const MatrixField f = with_trunc(phi, s.trunc);
  if (static_cast<int>(gen.dx.size()) != s.dim) throw ShapeError("generator needs D displacement fields");
  for (const auto& g : gen.dx) require_same(g.spec, s);
  require_same(gen.dF.spec, s);
  std::vector<MatrixField> j(s.dim, MatrixField(s));
  for (int mu = 0; mu < s.dim; ++mu) {
    for (int nu = 0; nu < s.dim; ++nu) j[mu].coeff += 0.5 * detail::anti(gen.dx[nu].coeff, t.at(mu, nu).coeff);
    j[mu].coeff -= 0.5 * kContractionSign * detail::anti(gen.dF.coeff, partial(f, mu).coeff);
  }
  return j;
}

// Grid backend: ∫ T_ρμ = ∫ ∂_ρφ ∂_μφ − δ_ρμ S.
inline Eigen::MatrixXcd energy_momentum_integrals_grid(const GridField& phi, const GWParams& p) {
  const int dim = phi.spec.dim;
  std::vector<GridField> d;
  for (int mu = 0; mu < dim; ++mu) d.push_back(spectral_derivative(phi, mu));
  const double s = action_grid(phi, p);
  Eigen::MatrixXcd out(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int m = 0; m < dim; ++m) {
      cplx acc = 0.0;
      for (std::size_t i = 0; i < phi.size(); ++i) acc += d[r][i] * d[m][i];
      out(r, m) = acc * phi.spec.cell_volume() - (r == m ? s : 0.0);
    }
  return out;
}

inline void write_tensor_csv(const std::string& path, const TensorField& t) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << std::setprecision(17);
  os << (t.rank == 2 ? "rho,mu" : "nu,rho,mu") << ",k,l,re,im\n";
  const int n = t.spec().size();
  for (std::size_t c = 0; c < t.components.size(); ++c) {
    const int a = static_cast<int>(c) / t.dim, b = static_cast<int>(c) % t.dim;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const cplx v = t.components[c].coeff(k, l);
        if (t.rank == 2) os << a << ',' << b;
        else os << a / t.dim << ',' << a % t.dim << ',' << b;
        os << ',' << k << ',' << l << ',' << v.real() << ',' << v.imag() << '\n';
      }
  }
}

}  // namespace moyal
