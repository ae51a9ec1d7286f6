#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "moyal/error.hpp"

namespace moyal {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Index raising in the Lagrangian contractions: x̃^μ = σ x̃_μ, ∂^μ = σ ∂_μ.
inline constexpr double kContractionSign = -1.0;

struct AlgebraSpec {
  double theta = 1.0;
  int dim = 2;
  int trunc = 8;

  void validate() const {
    if (!(theta > 0.0)) throw DomainError("theta must be positive");
    if (dim != 2 && dim != 4) throw DomainError("dim must be 2 or 4");
    if (trunc < 2) throw DomainError("trunc must be at least 2");
  }

  int pairs() const { return dim / 2; }
  int size() const { return dim == 2 ? trunc : trunc * trunc; }

  // Oscillator quantum number of flat index k in pair i.
  int component(int k, int pair) const {
    if (dim == 2) return k;
    return pair == 0 ? k / trunc : k % trunc;
  }
  int norm(int k) const { return dim == 2 ? k : k / trunc + k % trunc; }
  int flat(int k1, int k2 = 0) const { return dim == 2 ? k1 : k1 * trunc + k2; }

  // (2πθ)^{D/2}
  double volume() const { return std::pow(2.0 * std::numbers::pi * theta, 0.5 * dim); }

  bool operator==(const AlgebraSpec&) const = default;
};

struct MatrixField {
  AlgebraSpec spec;
  Matrix coeff;

  MatrixField() = default;
  explicit MatrixField(const AlgebraSpec& s) : spec(s), coeff(Matrix::Zero(s.size(), s.size())) {}
  MatrixField(const AlgebraSpec& s, Matrix c) : spec(s), coeff(std::move(c)) { check(); }

  static MatrixField zeros(const AlgebraSpec& s) { return MatrixField(s); }
  static MatrixField identity(const AlgebraSpec& s) {
    return MatrixField(s, Matrix::Identity(s.size(), s.size()));
  }
  static MatrixField cell(const AlgebraSpec& s, int k, int l, cplx value = 1.0) {
    MatrixField f(s);
    if (k < 0 || l < 0 || k >= s.size() || l >= s.size()) throw RangeError("cell index out of range");
    f.coeff(k, l) = value;
    return f;
  }

  void check() const {
    const auto n = spec.size();
    if (coeff.rows() != n || coeff.cols() != n) throw ShapeError("coefficient shape does not match spec");
  }

  bool is_hermitian(double tol = 1e-12) const {
    const double scale = std::max(1.0, coeff.cwiseAbs().maxCoeff());
    return (coeff - coeff.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
  }

  double norm() const { return coeff.norm(); }

  MatrixField& operator+=(const MatrixField& o) { coeff += o.coeff; return *this; }
  MatrixField& operator-=(const MatrixField& o) { coeff -= o.coeff; return *this; }
  MatrixField& operator*=(cplx s) { coeff *= s; return *this; }
  friend MatrixField operator+(MatrixField a, const MatrixField& b) { return a += b; }
  friend MatrixField operator-(MatrixField a, const MatrixField& b) { return a -= b; }
  friend MatrixField operator*(cplx s, MatrixField a) { return a *= s; }
  friend MatrixField operator*(double s, MatrixField a) { return a *= cplx(s); }
};

inline void require_same(const AlgebraSpec& a, const AlgebraSpec& b) {
  if (!(a == b)) throw ShapeError("algebra spec mismatch");
}

inline MatrixField star_matrix(const MatrixField& a, const MatrixField& b) {
  require_same(a.spec, b.spec);
  return MatrixField(a.spec, a.coeff * b.coeff);
}

inline MatrixField adjoint(const MatrixField& f) { return MatrixField(f.spec, f.coeff.adjoint()); }

inline cplx integrate_matrix(const MatrixField& f) { return f.spec.volume() * f.coeff.trace(); }

enum class Ladder { a, abar };
enum class Side { left, right };

// Truncated annihilator of pair i: A_{k, k+e_i} = sqrt((k_i+1) θ).
inline Matrix ladder_matrix(const AlgebraSpec& s, int pair = 0) {
  if (pair < 0 || pair >= s.pairs()) throw RangeError("oscillator pair out of range");
  const int n = s.size();
  Matrix A = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const int ki = s.component(k, pair);
    if (ki + 1 >= s.trunc) continue;
    const int up = s.dim == 2 ? k + 1 : (pair == 0 ? k + s.trunc : k + 1);
    A(k, up) = std::sqrt((ki + 1) * s.theta);
  }
  return A;
}

inline MatrixField ladder_apply(const MatrixField& f, Ladder which, Side side, int pair = 0) {
  Matrix A = ladder_matrix(f.spec, pair);
  if (which == Ladder::abar) A.adjointInPlace();
  return MatrixField(f.spec, side == Side::left ? Matrix(A * f.coeff) : Matrix(f.coeff * A));
}

// θ(|k| + D/4) per multi-index.
inline Eigen::VectorXd harmonic_spectrum(const AlgebraSpec& s) {
  Eigen::VectorXd v(s.size());
  for (int k = 0; k < s.size(); ++k) v(k) = s.theta * (s.norm(k) + 0.25 * s.dim);
  return v;
}

inline MatrixField harmonic_apply(const MatrixField& f, Side side) {
  const Eigen::VectorXd h = harmonic_spectrum(f.spec);
  MatrixField out(f.spec);
  if (side == Side::left) out.coeff = h.asDiagonal() * f.coeff;
  else out.coeff = f.coeff * h.asDiagonal();
  return out;
}

// Σ_μ x̃_μ⋆x̃_μ⋆f = −(8/θ²) H⋆f
inline MatrixField xtilde_square_left(const MatrixField& f) {
  auto out = harmonic_apply(f, Side::left);
  out.coeff *= -8.0 / (f.spec.theta * f.spec.theta);
  return out;
}

inline MatrixField xtilde_square_right(const MatrixField& f) {
  auto out = harmonic_apply(f, Side::right);
  out.coeff *= -8.0 / (f.spec.theta * f.spec.theta);
  return out;
}

// Σ_μ x̃_μ⋆f⋆x̃_μ = −(4/θ²) Σ_pairs (a⋆f⋆ā + ā⋆f⋆a)
inline MatrixField xtilde_sandwich(const MatrixField& f) {
  MatrixField out(f.spec);
  for (int p = 0; p < f.spec.pairs(); ++p) {
    const Matrix A = ladder_matrix(f.spec, p);
    out.coeff += A * f.coeff * A.adjoint() + A.adjoint() * f.coeff * A;
  }
  out.coeff *= -4.0 / (f.spec.theta * f.spec.theta);
  return out;
}

// Coordinate x_μ: x_{2i} = (a_i + ā_i)/√2, x_{2i+1} = (a_i − ā_i)/(i√2).
inline Matrix coordinate_matrix(const AlgebraSpec& s, int mu) {
  if (mu < 0 || mu >= s.dim) throw RangeError("direction index out of range");
  const Matrix A = ladder_matrix(s, mu / 2);
  const Matrix Ad = A.adjoint();
  if (mu % 2 == 0) return (A + Ad) / std::sqrt(2.0);
  return (A - Ad) / (cplx(0.0, 1.0) * std::sqrt(2.0));
}

// x̃_μ = 2Θ⁻¹_{μν}x^ν with Θ = θJ per pair: x̃_{2i} = −(2/θ)x_{2i+1}, x̃_{2i+1} = (2/θ)x_{2i}.
inline Matrix xtilde_matrix(const AlgebraSpec& s, int mu) {
  if (mu < 0 || mu >= s.dim) throw RangeError("direction index out of range");
  if (mu % 2 == 0) return (-2.0 / s.theta) * coordinate_matrix(s, mu + 1);
  return (2.0 / s.theta) * coordinate_matrix(s, mu - 1);
}

inline MatrixField partial(const MatrixField& f, int mu) {
  const Matrix X = xtilde_matrix(f.spec, mu);
  return MatrixField(f.spec, (X * f.coeff - f.coeff * X) / cplx(0.0, 2.0));
}

// Change truncation, keeping multi-indices; cells beyond the new cutoff are dropped.
inline MatrixField with_trunc(const MatrixField& f, int trunc) {
  AlgebraSpec s = f.spec;
  s.trunc = trunc;
  MatrixField out(s);
  const int n = f.spec.size();
  const int lim = std::min(trunc, f.spec.trunc);
  auto map = [&](int k) -> int {
    if (f.spec.dim == 2) return k < lim ? k : -1;
    const int k1 = k / f.spec.trunc, k2 = k % f.spec.trunc;
    return (k1 < lim && k2 < lim) ? k1 * trunc + k2 : -1;
  };
  for (int k = 0; k < n; ++k) {
    const int nk = map(k);
    if (nk < 0) continue;
    for (int l = 0; l < n; ++l) {
      const int nl = map(l);
      if (nl >= 0) out.coeff(nk, nl) = f.coeff(k, l);
    }
  }
  return out;
}

// Largest oscillator quantum number carrying a nonzero coefficient (−1 for zero field).
inline int support_extent(const MatrixField& f, double tol = 0.0) {
  int top = -1;
  for (int k = 0; k < f.spec.size(); ++k)
    for (int l = 0; l < f.spec.size(); ++l)
      if (std::abs(f.coeff(k, l)) > tol)
        for (int p = 0; p < f.spec.pairs(); ++p)
          top = std::max({top, f.spec.component(k, p), f.spec.component(l, p)});
  return top;
}

// Parity (−1)^{|k|} acting on rows.
inline MatrixField left_parity(const MatrixField& f) {
  MatrixField out = f;
  for (int k = 0; k < f.spec.size(); ++k)
    if (f.spec.norm(k) % 2) out.coeff.row(k) *= -1.0;
  return out;
}

// exp(i f) by scaling and squaring of a Taylor polynomial.
inline MatrixField star_exp(const MatrixField& f) {
  const int n = f.spec.size();
  Matrix X = cplx(0.0, 1.0) * f.coeff;
  const double nrm = X.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (nrm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  X /= std::ldexp(1.0, squarings);
  Matrix term = Matrix::Identity(n, n);
  Matrix sum = term;
  for (int j = 1; j <= 24; ++j) {
    term = term * X / static_cast<double>(j);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return MatrixField(f.spec, sum);
}

}  // namespace moyal
