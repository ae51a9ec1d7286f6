#pragma once

#include <random>

#include "moyal/algebra.hpp"
#include "moyal/grid.hpp"

namespace moyal::cli {

// Hermitian field with every oscillator index below `support` in each pair.
inline MatrixField random_supported(const AlgebraSpec& s, std::mt19937_64& rng, int support, double scale = 1.0,
                                    bool hermitian = true) {
  std::normal_distribution<double> nd(0.0, scale);
  MatrixField f(s);
  for (int k = 0; k < s.size(); ++k)
    for (int l = 0; l < s.size(); ++l) {
      bool inside = true;
      for (int p = 0; p < s.pairs(); ++p)
        inside = inside && s.component(k, p) < support && s.component(l, p) < support;
      if (inside) f.coeff(k, l) = cplx(nd(rng), nd(rng));
    }
  if (hermitian) f.coeff = 0.5 * (f.coeff + f.coeff.adjoint()).eval();
  return f;
}

// Interior cells keep every index ≤ N−3, two levels clear of the truncation edge.
inline int interior_support(const AlgebraSpec& s) { return s.trunc - 2; }

inline double relative_l2(const GridField& a, const GridField& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - ref[i]);
    den += std::norm(ref[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double relative_norm(const Matrix& a, const Matrix& ref) {
  const double d = ref.norm();
  return d > 0.0 ? (a - ref).norm() / d : (a - ref).norm();
}

}  // namespace moyal::cli
