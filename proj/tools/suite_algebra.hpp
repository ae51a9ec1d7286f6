#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "moyal/config.hpp"
#include "moyal/report.hpp"
#include "suite_common.hpp"

namespace moyal::cli {

inline void basis_checks(Report& r, const AlgebraSpec& s, std::mt19937_64& rng) {
  const int n = s.size();
  const long long all = 1LL * n * n * n * n;
  double worst = 0.0;
  auto probe = [&](int k, int l, int m, int q) {
    const auto p = star_matrix(MatrixField::cell(s, k, l), MatrixField::cell(s, m, q));
    Matrix want = Matrix::Zero(n, n);
    if (l == m) want(k, q) = 1.0;
    worst = std::max(worst, (p.coeff - want).cwiseAbs().maxCoeff());
  };
  if (all <= 65536) {
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
          for (int q = 0; q < n; ++q) probe(k, l, m, q);
  } else {
    std::uniform_int_distribution<int> u(0, n - 1);
    for (int t = 0; t < 4096; ++t) {
      const int k = u(rng), l = u(rng), q = u(rng);
      probe(k, l, t % 2 ? l : u(rng), q);
    }
  }
  r.bound("basis.projector_family", worst, 0.0, "e_kl * e_mn = delta_lm e_kn");

  double ladder = 0.0, harmonic = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const auto b = MatrixField::cell(s, k, l);
      for (int p = 0; p < s.pairs(); ++p) {
        const int kp = s.component(k, p), lp = s.component(l, p);
        auto moved = [&](int idx, int d) {
          const int c = s.component(idx, p) + d;
          if (c < 0 || c >= s.trunc) return -1;
          if (s.dim == 2) return c;
          return p == 0 ? s.flat(c, s.component(idx, 1)) : s.flat(s.component(idx, 0), c);
        };
        auto expect = [&](int kk, int ll, double v) {
          MatrixField e(s);
          if (kk >= 0 && ll >= 0) e.coeff(kk, ll) = v;
          return e.coeff;
        };
        const double th = s.theta;
        ladder = std::max(ladder, (ladder_apply(b, Ladder::a, Side::left, p).coeff -
                                   expect(moved(k, -1), l, std::sqrt(kp * th))).cwiseAbs().maxCoeff());
        ladder = std::max(ladder, (ladder_apply(b, Ladder::a, Side::right, p).coeff -
                                   expect(k, moved(l, 1), std::sqrt((lp + 1) * th))).cwiseAbs().maxCoeff());
        ladder = std::max(ladder, (ladder_apply(b, Ladder::abar, Side::left, p).coeff -
                                   expect(moved(k, 1), l, std::sqrt((kp + 1) * th))).cwiseAbs().maxCoeff());
        ladder = std::max(ladder, (ladder_apply(b, Ladder::abar, Side::right, p).coeff -
                                   expect(k, moved(l, -1), std::sqrt(lp * th))).cwiseAbs().maxCoeff());
      }
      // H ⋆ e_kl = θ(|k| + D/4) e_kl and e_kl ⋆ H = θ(|l| + D/4) e_kl
      const double hk = s.theta * (s.norm(k) + 0.25 * s.dim), hl = s.theta * (s.norm(l) + 0.25 * s.dim);
      harmonic = std::max(harmonic, (harmonic_apply(b, Side::left).coeff - hk * b.coeff).cwiseAbs().maxCoeff());
      harmonic = std::max(harmonic, (harmonic_apply(b, Side::right).coeff - hl * b.coeff).cwiseAbs().maxCoeff());
    }
  r.bound("basis.ladder_actions", ladder, 1e-13, "a * e_kl = sqrt(k theta) e_(k-1)l, four sides");
  r.bound("basis.harmonic_actions", harmonic, 1e-13, "H * e_kl = theta(|k| + D/4) e_kl");
}

inline Report verify_algebra(const RunConfig& c) {
  Report r;
  r.suite = "verify-algebra";
  r.config = c.echo();
  const AlgebraSpec s{c.theta, c.dim, c.trunc};
  s.validate();
  const GridSpec g = c.grid();
  g.validate();
  std::mt19937_64 rng(c.seed);

  basis_checks(r, s, rng);

  double assoc = 0.0;
  for (int t = 0; t < 3; ++t) {
    const auto a = random_supported(s, rng, s.trunc, 1.0, false), b = random_supported(s, rng, s.trunc, 1.0, false),
               d = random_supported(s, rng, s.trunc, 1.0, false);
    assoc = std::max(assoc, relative_norm(star_matrix(star_matrix(a, b), d).coeff,
                                          star_matrix(a, star_matrix(b, d)).coeff));
  }
  r.bound("associativity.matrix", assoc, 1e-12, "(f * g) * h = f * (g * h)");

  const double vol = s.volume();
  const double quad = std::abs(integrate_grid(reconstruct(MatrixField::cell(s, 0, 0), g)) - vol) / vol;
  r.bound("cross.ground_integral", quad, 1e-8, "int f_00 = (2 pi theta)^(D/2)");

  const int support = interior_support(s);
  if (support < 1) {
    const char* why = "truncation leaves no interior cells";
    r.skip("cross.star_interior", "matrix star vs twisted-convolution star on interior fields", why);
    r.skip("cross.decompose_interior", "decompose(grid star) = matrix star", why);
  } else {
    double worst = 0.0, coeff = 0.0;
    for (int t = 0; t < c.random_fields; ++t) {
      const auto a = random_supported(s, rng, support), b = random_supported(s, rng, support);
      const auto exact = star_matrix(a, b);
      const auto viaGrid = star_grid(reconstruct(a, g), reconstruct(b, g), s.theta);
      worst = std::max(worst, relative_l2(viaGrid, reconstruct(exact, g)));
      coeff = std::max(coeff, relative_norm(decompose(viaGrid, s).coeff, exact.coeff));
    }
    r.bound("cross.star_interior", worst, 1e-6, "matrix star vs twisted-convolution star on interior fields");
    r.bound("cross.decompose_interior", coeff, 1e-6, "decompose(grid star) = matrix star");
  }
  r.results["random_fields"] = c.random_fields;
  r.results["interior_support"] = std::max(support, 0);
  return r;
}

}  // namespace moyal::cli
