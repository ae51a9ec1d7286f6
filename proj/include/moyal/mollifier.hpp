#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "moyal/error.hpp"
#include "moyal/grid.hpp"

namespace moyal {

inline constexpr double kExponentFloor = 1e-12;

namespace detail {

// exp(1/(r²−1)) inside the unit ball.
inline double bump_profile(double r2) {
  const double gap = 1.0 - r2;
  if (gap < kExponentFloor) return 0.0;
  return std::exp(-1.0 / gap);
}

struct GaussRule {
  std::vector<double> nodes, weights;
};

// Gauss-Legendre nodes on [−1, 1] by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
  GaussRule g{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    g.nodes[i] = x;
    g.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

inline const GaussRule& gauss20() {
  static const GaussRule g = gauss_legendre(20);
  return g;
}

// Composite Gauss-Legendre on [a, b] with the given number of panels.
inline double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels) {
  const GaussRule& g = gauss20();
  const double w = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * w;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) sum += g.weights[i] * f(mid + 0.5 * w * g.nodes[i]);
  }
  return 0.5 * w * sum;
}

inline double sphere_area(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    default: return 4.0 * std::numbers::pi;
  }
}

// Radial Gauss-Legendre with panel doubling until two levels agree.
inline double ball_integral_radial(int n) {
  auto f = [n](double r) { return std::pow(r, n - 1) * bump_profile(r * r); };
  double prev = composite_gauss(f, 0.0, 1.0, 4);
  for (int panels = 8; panels <= 1024; panels *= 2) {
    const double cur = composite_gauss(f, 0.0, 1.0, panels);
    if (std::abs(cur - prev) < 1e-15) return sphere_area(n) * cur;
    prev = cur;
  }
  return sphere_area(n) * prev;
}

// Uniform trapezoid on the cube [−1, 1]^n; the integrand vanishes with all derivatives at the sphere.
inline double ball_integral_uniform(int n, int points) {
  const double dx = 2.0 / (points - 1);
  std::vector<double> x(points);
  for (int i = 0; i < points; ++i) x[i] = -1.0 + i * dx;
  double sum = 0.0;
  if (n == 1) {
    for (double a : x) sum += bump_profile(a * a);
  } else if (n == 2) {
    for (double a : x)
      for (double b : x) sum += bump_profile(a * a + b * b);
  } else {
    for (double a : x)
      for (double b : x)
        for (double c : x) sum += bump_profile(a * a + b * b + c * c);
  }
  return sum * std::pow(dx, n);
}

}  // namespace detail

// c(n) = [∫_{|u|<1} exp(1/(|u|²−1)) du]^{−1}, cross-checked by two quadratures.
inline double normalization_c(int n) {
  if (n < 1 || n > 3) throw DomainError("mollifier dimension must be 1, 2 or 3");
  static std::array<double, 4> cache{};
  static std::mutex m;
  std::lock_guard lock(m);
  if (cache[n] > 0.0) return cache[n];
  const double radial = detail::ball_integral_radial(n);
  const double uniform = detail::ball_integral_uniform(n, n == 3 ? 161 : 801);
  if (std::abs(radial - uniform) > 1e-10 * radial) {
    std::ostringstream os;
    os << std::setprecision(17) << "mollifier normalization quadratures disagree: " << radial << " vs " << uniform;
    throw InternalError(os.str());
  }
  cache[n] = 1.0 / radial;
  return cache[n];
}

struct MollifierSpec {
  int n = 1;
  double h = 0.1;
  double c = 0.0;

  static MollifierSpec make(int n, double h) {
    MollifierSpec s{n, h, normalization_c(n)};
    s.validate();
    return s;
  }

  void validate() const {
    if (n < 1 || n > 3) throw DomainError("mollifier dimension must be 1, 2 or 3");
    if (!(h > 0.0 && h < 1.0)) throw DomainError("mollifier scale h must lie in (0, 1)");
    if (!(c > 0.0)) throw DomainError("mollifier normalization must be positive");
  }
};

inline double bump(std::span<const double> u, const MollifierSpec& s) {
  if (static_cast<int>(u.size()) != s.n) throw ShapeError("bump argument has the wrong dimension");
  double r2 = 0.0;
  for (double v : u) r2 += v * v;
  return s.c * detail::bump_profile(r2);
}

inline double bump(double u, const MollifierSpec& s) { return bump(std::span<const double>(&u, 1), s); }

// ω_h(x) = ω(x/h)/h^n.
inline double omega_h(std::span<const double> x, const MollifierSpec& s) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  if (static_cast<int>(x.size()) != s.n) throw ShapeError("omega_h argument has the wrong dimension");
  return s.c * detail::bump_profile(r2 / (s.h * s.h)) / std::pow(s.h, s.n);
}

inline double omega_h(double x, double h) {
  const double c = normalization_c(1);
  return c * detail::bump_profile(x * x / (h * h)) / h;
}

// ε_h(λ) = 2∫_0^λ ω_h: the smoothed sign function.
inline double eps_h(double lambda, double h) {
  const double s = std::min(std::abs(lambda) / h, 1.0);
  if (s == 0.0) return 0.0;
  const double c = normalization_c(1);
  const double v = 2.0 * c * detail::composite_gauss([](double u) { return detail::bump_profile(u * u); }, 0.0, s, 16);
  return lambda < 0.0 ? -v : v;
}

// Uniformly sampled function of one variable on [x0, x0 + (size−1)dx].
struct Sampled1D {
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<double> values;

  double node(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }
  std::size_t size() const { return values.size(); }

  static Sampled1D sample(double a, double b, std::size_t points, const std::function<double(double)>& f) {
    if (points < 2 || !(b > a)) throw DomainError("sampling window must have b > a and at least two points");
    Sampled1D s{a, (b - a) / static_cast<double>(points - 1), std::vector<double>(points)};
    for (std::size_t i = 0; i < points; ++i) s.values[i] = f(s.node(i));
    return s;
  }
};

// Sampled ω_h at offsets j·dx, |j| ≤ r; raw values, not renormalized.
inline std::vector<double> kernel_weights(double dx, double h) {
  const int r = static_cast<int>(std::ceil(h / dx));
  std::vector<double> w(2 * r + 1);
  for (int j = -r; j <= r; ++j) w[j + r] = omega_h(j * dx, h);
  return w;
}

inline void require_resolution(double dx, double h) {
  if (h < 4.0 * dx) {
    std::ostringstream os;
    os << "mollifier scale h=" << h << " covers fewer than 4 grid cells of size " << dx;
    throw ResolutionError(os.str());
  }
}

// L_h(x) = Σ_y w(x−y) L(y) with weights renormalized over the window,
// evaluated as L(x) + Σ w (L(y) − L(x)) / Σ w.
inline Sampled1D smooth(const Sampled1D& f, double h) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("mollifier scale h must lie in (0, 1)");
  require_resolution(f.dx, h);
  const std::vector<double> w = kernel_weights(f.dx, h);
  const int r = static_cast<int>(w.size() / 2);
  const int n = static_cast<int>(f.size());
  Sampled1D out = f;
  for (int i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    for (int j = std::max(-r, -i); j <= std::min(r, n - 1 - i); ++j) {
      num += w[j + r] * (f.values[i + j] - f.values[i]);
      den += w[j + r];
    }
    out.values[i] = f.values[i] + num / den;
  }
  return out;
}

// Two-dimensional smoothing of a D=2 grid field with the radial kernel.
inline GridField smooth(const GridField& f, double h) {
  if (f.spec.dim != 2) throw ShapeError("grid smoothing supports D=2 fields");
  if (!(h > 0.0 && h < 1.0)) throw DomainError("mollifier scale h must lie in (0, 1)");
  const double dx = f.spec.spacing();
  require_resolution(dx, h);
  const MollifierSpec s = MollifierSpec::make(2, h);
  const int r = static_cast<int>(std::ceil(h / dx));
  const int side = 2 * r + 1;
  std::vector<double> w(static_cast<std::size_t>(side * side));
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b) {
      const std::array<double, 2> x{a * dx, b * dx};
      w[static_cast<std::size_t>((a + r) * side + b + r)] = omega_h(x, s);
    }
  const int m = f.spec.points;
  GridField out = f;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const cplx centre = f[static_cast<std::size_t>(i * m + j)];
      cplx num = 0.0;
      double den = 0.0;
      for (int a = std::max(-r, -i); a <= std::min(r, m - 1 - i); ++a)
        for (int b = std::max(-r, -j); b <= std::min(r, m - 1 - j); ++b) {
          const double wt = w[static_cast<std::size_t>((a + r) * side + b + r)];
          if (wt == 0.0) continue;
          num += wt * (f[static_cast<std::size_t>((i + a) * m + j + b)] - centre);
          den += wt;
        }
      out[static_cast<std::size_t>(i * m + j)] = centre + num / den;
    }
  return out;
}

struct ScanRow {
  double h = 0.0;
  double l1_error = 0.0;
  double lipschitz_bound = 0.0;  // K·h·|D|, or 0 when no constant is supplied
  double lemma_constant = 0.0;   // max ω_h = c/(e h)
};

// ∫_D |L_h − L| by the trapezoid rule on the samples.
inline double l1_distance(const Sampled1D& a, const Sampled1D& b) {
  if (a.size() != b.size()) throw ShapeError("sampled functions differ in size");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double v = std::abs(a.values[i] - b.values[i]);
    sum += (i == 0 || i + 1 == a.size()) ? 0.5 * v : v;
  }
  return sum * a.dx;
}

inline std::vector<ScanRow> convergence_scan(const Sampled1D& f, const std::vector<double>& hs,
                                             double lipschitz = 0.0) {
  const double measure = f.dx * static_cast<double>(f.size() - 1);
  const double c = normalization_c(1);
  std::vector<ScanRow> rows;
  for (double h : hs) {
    ScanRow r;
    r.h = h;
    r.l1_error = l1_distance(smooth(f, h), f);
    r.lipschitz_bound = lipschitz * h * measure;
    r.lemma_constant = c * std::exp(-1.0) / h;
    rows.push_back(r);
  }
  return rows;
}

inline void write_scan_csv(const std::string& path, const std::vector<ScanRow>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << std::setprecision(17) << "h,l1_error,lipschitz_bound,lemma_constant\n";
  for (const auto& r : rows) os << r.h << ',' << r.l1_error << ',' << r.lipschitz_bound << ',' << r.lemma_constant << '\n';
}

}  // namespace moyal
