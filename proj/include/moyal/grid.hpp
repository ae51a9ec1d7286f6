#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "moyal/algebra.hpp"
#include "moyal/error.hpp"
#include "moyal/fft.hpp"
#include "moyal/laguerre.hpp"

namespace moyal {

inline constexpr std::int64_t kGridPointCap = std::int64_t{1} << 24;

struct GridSpec {
  int dim = 2;
  double extent = 10.0;
  int points = 128;

  void validate() const {
    if (dim != 2 && dim != 4) throw DomainError("grid dim must be 2 or 4");
    if (!(extent > 0.0)) throw DomainError("grid extent must be positive");
    if (points < 8 || points % 2) throw DomainError("grid points must be even and at least 8");
    if (total() > kGridPointCap) throw DomainError("grid exceeds the point cap");
  }

  std::int64_t total() const {
    std::int64_t n = 1;
    for (int a = 0; a < dim; ++a) n *= points;
    return n;
  }
  double spacing() const { return 2.0 * extent / points; }
  double node(int j) const { return -extent + j * spacing(); }
  double frequency(int n) const { return std::numbers::pi * fft::signed_bin(n, points) / extent; }
  double cell_volume() const { return std::pow(spacing(), dim); }
  std::vector<int> shape() const { return std::vector<int>(dim, points); }

  bool operator==(const GridSpec&) const = default;
};

struct GridField {
  GridSpec spec;
  std::vector<cplx> values;
  std::vector<std::string> warnings;

  GridField() = default;
  explicit GridField(const GridSpec& s) : spec(s), values(static_cast<std::size_t>(s.total())) {}

  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }

  // Multi-index of flat position.
  std::array<int, 4> index(std::size_t i) const {
    std::array<int, 4> idx{};
    for (int a = spec.dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(i % spec.points);
      i /= spec.points;
    }
    return idx;
  }

  double l2_norm() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s * spec.cell_volume());
  }
};

inline void require_same(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw ShapeError("grid spec mismatch");
}

template <class F>
GridField sample(const GridSpec& g, F&& fn) {
  g.validate();
  GridField out(g);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto idx = out.index(i);
    std::array<double, 4> x{};
    for (int a = 0; a < g.dim; ++a) x[a] = g.node(idx[a]);
    out[i] = fn(x);
  }
  return out;
}

inline GridField sample_fkl(int k, int l, double theta, const GridSpec& g) {
  if (g.dim != 2) throw ShapeError("sample_fkl(k, l) needs a D=2 grid");
  return sample(g, [&](const std::array<double, 4>& x) { return fkl_value(k, l, theta, x[0], x[1]); });
}

inline GridField sample_fkl(std::array<int, 2> k, std::array<int, 2> l, double theta, const GridSpec& g) {
  if (g.dim != 4) throw ShapeError("multi-index sample_fkl needs a D=4 grid");
  return sample(g, [&](const std::array<double, 4>& x) {
    return fkl_value(k[0], l[0], theta, x[0], x[1]) * fkl_value(k[1], l[1], theta, x[2], x[3]);
  });
}

// Sampled b_kl for flat multi-indices of an algebra.
inline GridField sample_cell(const AlgebraSpec& s, int k, int l, const GridSpec& g) {
  if (s.dim != g.dim) throw ShapeError("algebra and grid dimensions differ");
  if (s.dim == 2) return sample_fkl(k, l, s.theta, g);
  return sample_fkl({s.component(k, 0), s.component(k, 1)}, {s.component(l, 0), s.component(l, 1)}, s.theta, g);
}

inline cplx integrate_grid(const GridField& f) {
  cplx s = 0.0;
  for (const auto& v : f.values) s += v;
  return s * f.spec.cell_volume();
}

namespace detail {

// Table of D=2 basis samples, row k*N + l, column = flat node of a 2D grid.
inline Matrix basis_table(int trunc, double theta, const GridSpec& g2) {
  const int m = g2.points;
  Matrix t(trunc * trunc, m * m);
  for (int k = 0; k < trunc; ++k)
    for (int l = k; l < trunc; ++l)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          const cplx v = fkl_value(k, l, theta, g2.node(i), g2.node(j));
          t(k * trunc + l, i * m + j) = v;
          t(l * trunc + k, i * m + j) = std::conj(v);
        }
  return t;
}

inline GridSpec pair_grid(const GridSpec& g) { return {2, g.extent, g.points}; }

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace detail

inline GridField reconstruct(const MatrixField& m, const GridSpec& g) {
  m.spec.validate();
  g.validate();
  if (m.spec.dim != g.dim) throw ShapeError("algebra and grid dimensions differ");
  const int n = m.spec.trunc;
  const Matrix table = detail::basis_table(n, m.spec.theta, detail::pair_grid(g));
  GridField out(g);
  if (g.dim == 2) {
    Eigen::VectorXcd c(n * n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) c(k * n + l) = m.coeff(k, l);
    Eigen::Map<Eigen::VectorXcd>(out.values.data(), out.size()) = table.transpose() * c;
    return out;
  }
  Matrix c(n * n, n * n);
  for (int k = 0; k < m.spec.size(); ++k)
    for (int l = 0; l < m.spec.size(); ++l)
      c(m.spec.component(k, 0) * n + m.spec.component(l, 0), m.spec.component(k, 1) * n + m.spec.component(l, 1)) =
          m.coeff(k, l);
  const long mm = static_cast<long>(g.points) * g.points;
  Eigen::Map<detail::RowMat>(out.values.data(), mm, mm) = table.transpose() * c * table;
  return out;
}

// g_kl = (2πθ)^{-D/2} ∫ g conj(b_kl).
inline MatrixField decompose(const GridField& f, const AlgebraSpec& s) {
  s.validate();
  if (s.dim != f.spec.dim) throw ShapeError("algebra and grid dimensions differ");
  const int n = s.trunc;
  const Matrix table = detail::basis_table(n, s.theta, detail::pair_grid(f.spec)).conjugate();
  const double w = f.spec.cell_volume() / s.volume();
  MatrixField out(s);
  if (s.dim == 2) {
    const Eigen::VectorXcd c = w * (table * Eigen::Map<const Eigen::VectorXcd>(f.values.data(), f.size()));
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) out.coeff(k, l) = c(k * n + l);
    return out;
  }
  const long mm = static_cast<long>(f.spec.points) * f.spec.points;
  const Matrix c = w * (table * Eigen::Map<const detail::RowMat>(f.values.data(), mm, mm) * table.transpose());
  for (int k = 0; k < s.size(); ++k)
    for (int l = 0; l < s.size(); ++l)
      out.coeff(k, l) =
          c(s.component(k, 0) * n + s.component(l, 0), s.component(k, 1) * n + s.component(l, 1));
  return out;
}

// Max boundary magnitude relative to the field maximum.
inline double boundary_ratio(const GridField& f) {
  double edge = 0.0, peak = 0.0;
  const int m = f.spec.points;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::abs(f[i]);
    peak = std::max(peak, a);
    const auto idx = f.index(i);
    for (int d = 0; d < f.spec.dim; ++d)
      if (idx[d] == 0 || idx[d] == m - 1) {
        edge = std::max(edge, a);
        break;
      }
  }
  return peak > 0.0 ? edge / peak : 0.0;
}

namespace detail {

// Moyal product of two D=2 slices (row-major M×M), Θ = θJ.
inline void star2d(const cplx* f, const cplx* g, cplx* h, const GridSpec& g2, double theta) {
  const int m = g2.points;
  const std::size_t mm = static_cast<std::size_t>(m) * m;
  const std::vector<int> sq{m, m};
  std::vector<double> p(m);
  for (int n = 0; n < m; ++n) p[n] = g2.frequency(n);

  auto coefficients = [&](const cplx* src) {
    std::vector<cplx> c(src, src + mm);
    fft::along_axis(c, sq, 0, fft::Direction::forward);
    fft::along_axis(c, sq, 1, fft::Direction::forward);
    std::vector<cplx> t(mm);
    const double inv = 1.0 / static_cast<double>(mm);
    for (int n1 = 0; n1 < m; ++n1)
      for (int n2 = 0; n2 < m; ++n2) t[n2 * m + n1] = c[n1 * m + n2] * (n2 % 2 ? -inv : inv);
    return t;
  };
  const std::vector<cplx> a = coefficients(f);
  const std::vector<cplx> b = coefficients(g);

  // gt[n2][m2][i1] = Σ_{n1} b[m2][n1] e^{i p_{n1}(x_{i1} + θ p_{n2}/2)}
  std::vector<cplx> gt(mm * m);
  for (int n2 = 0; n2 < m; ++n2) {
    cplx* blk = gt.data() + n2 * mm;
    for (int n1 = 0; n1 < m; ++n1) {
      const cplx ph = std::polar(1.0, 0.5 * theta * p[n1] * p[n2]);
      for (int m2 = 0; m2 < m; ++m2) blk[m2 * m + n1] = b[m2 * m + n1] * ph;
    }
    fft::along_axis(blk, sq, 1, fft::Direction::backward);
  }

  std::vector<cplx> acc(mm, 0.0), ft(mm);
  for (int m2 = 0; m2 < m; ++m2) {
    for (int n1 = 0; n1 < m; ++n1) {
      const cplx ph = std::polar(1.0, -0.5 * theta * p[n1] * p[m2]);
      for (int n2 = 0; n2 < m; ++n2) ft[n2 * m + n1] = a[n2 * m + n1] * ph;
    }
    fft::along_axis(ft, sq, 1, fft::Direction::backward);
    for (int n2 = 0; n2 < m; ++n2) {
      const cplx* fr = ft.data() + n2 * m;
      const cplx* gr = gt.data() + n2 * mm + m2 * m;
      cplx* out = acc.data() + ((n2 + m2) % m) * m;
      for (int i1 = 0; i1 < m; ++i1) out[i1] += fr[i1] * gr[i1];
    }
  }
  for (int s = 0; s < m; ++s)
    for (int i1 = 0; i1 < m; ++i1) h[i1 * m + s] = s % 2 ? -acc[s * m + i1] : acc[s * m + i1];
  fft::along_axis(h, sq, 1, fft::Direction::backward);
}

// D=4: pair (x3,x4) handled by the same twisted sum, pair (x1,x2) slice-wise.
inline void star4d(const GridField& f, const GridField& g, GridField& h, double theta) {
  const GridSpec& s = f.spec;
  const int m = s.points;
  const std::size_t m2 = static_cast<std::size_t>(m) * m;
  const std::size_t slab = m2 * m;  // (x12, x3)
  std::vector<double> p(m);
  for (int n = 0; n < m; ++n) p[n] = s.frequency(n);
  const std::vector<int> shape4 = s.shape();
  const std::vector<int> shape3{static_cast<int>(m2), m};

  // coefficient in (x3, x4): c[x12][n3][n4] with (−1)^{n4}/M² folded in.
  auto coefficients = [&](const GridField& src) {
    std::vector<cplx> c = src.values;
    fft::along_axis(c, shape4, 2, fft::Direction::forward);
    fft::along_axis(c, shape4, 3, fft::Direction::forward);
    const double inv = 1.0 / static_cast<double>(m2);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= (i % m) % 2 ? -inv : inv;
    return c;
  };
  const std::vector<cplx> cf = coefficients(f);
  const std::vector<cplx> cg = coefficients(g);

  // table[shift][n4](x12, x3) = Σ_{n3} c[x12][n3][n4] e^{i p3 (x3 + sign θ p_shift / 2)}
  auto build = [&](const std::vector<cplx>& c, double sign) {
    std::vector<cplx> t(slab * m2);
    for (int sh = 0; sh < m; ++sh)
      for (int n4 = 0; n4 < m; ++n4) {
        cplx* blk = t.data() + (static_cast<std::size_t>(sh) * m + n4) * slab;
        for (std::size_t x12 = 0; x12 < m2; ++x12)
          for (int n3 = 0; n3 < m; ++n3)
            blk[x12 * m + n3] = c[(x12 * m + n3) * m + n4] * std::polar(1.0, sign * 0.5 * theta * p[n3] * p[sh]);
        fft::along_axis(blk, shape3, 1, fft::Direction::backward);
      }
    return t;
  };
  const std::vector<cplx> ft = build(cf, -1.0);  // ft[q4][p4]
  const std::vector<cplx> gt = build(cg, +1.0);  // gt[p4][q4]

  const GridSpec g2{2, s.extent, m};
  std::vector<cplx> acc(slab * m, 0.0), a(m2), b(m2), r(m2);
  for (int n4 = 0; n4 < m; ++n4)
    for (int q4 = 0; q4 < m; ++q4) {
      const cplx* fa = ft.data() + (static_cast<std::size_t>(q4) * m + n4) * slab;
      const cplx* gb = gt.data() + (static_cast<std::size_t>(n4) * m + q4) * slab;
      const int sidx = (n4 + q4) % m;
      for (int i3 = 0; i3 < m; ++i3) {
        for (std::size_t x12 = 0; x12 < m2; ++x12) {
          a[x12] = fa[x12 * m + i3];
          b[x12] = gb[x12 * m + i3];
        }
        star2d(a.data(), b.data(), r.data(), g2, theta);
        for (std::size_t x12 = 0; x12 < m2; ++x12) acc[(x12 * m + i3) * m + sidx] += r[x12];
      }
    }
  for (std::size_t i = 0; i < acc.size(); ++i)
    if ((i % m) % 2) acc[i] = -acc[i];
  fft::along_axis(acc, shape4, 3, fft::Direction::backward);
  h.values = std::move(acc);
}

}  // namespace detail

inline GridField star_grid(const GridField& f, const GridField& g, double theta) {
  require_same(f.spec, g.spec);
  f.spec.validate();
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  GridField h(f.spec);
  if (f.spec.dim == 2) detail::star2d(f.values.data(), g.values.data(), h.values.data(), f.spec, theta);
  else detail::star4d(f, g, h, theta);
  if (boundary_ratio(f) > 1e-10 || boundary_ratio(g) > 1e-10)
    h.warnings.emplace_back("star_grid: input does not decay to 1e-10 at the grid boundary");
  return h;
}

// f(x + eps) by spectral phase shift.
inline GridField spectral_shift(const GridField& f, const std::array<double, 4>& eps) {
  GridField out = f;
  const auto shape = f.spec.shape();
  for (int a = 0; a < f.spec.dim; ++a) fft::along_axis(out.values, shape, a, fft::Direction::forward);
  const double inv = 1.0 / static_cast<double>(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto idx = out.index(i);
    double phase = 0.0;
    for (int a = 0; a < f.spec.dim; ++a) phase += f.spec.frequency(idx[a]) * eps[a];
    out[i] *= std::polar(inv, phase);
  }
  for (int a = 0; a < f.spec.dim; ++a) fft::along_axis(out.values, shape, a, fft::Direction::backward);
  return out;
}

// Spectral ∂_μ.
inline GridField spectral_derivative(const GridField& f, int mu) {
  if (mu < 0 || mu >= f.spec.dim) throw RangeError("direction index out of range");
  GridField out = f;
  const auto shape = f.spec.shape();
  fft::along_axis(out.values, shape, mu, fft::Direction::forward);
  const double inv = 1.0 / f.spec.points;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int n = out.index(i)[mu];
    const double k = (2 * n == f.spec.points) ? 0.0 : f.spec.frequency(n);
    out[i] *= cplx(0.0, k * inv);
  }
  fft::along_axis(out.values, shape, mu, fft::Direction::backward);
  return out;
}

// Smooth cutoff: 1 for |x| ≤ inner, ~1e-11 at the grid edge.
inline double edge_window(double x, double inner, double outer) {
  const double w = (outer - inner) / 10.6;
  const double c = 0.5 * (inner + outer);
  return 0.5 * std::erfc((std::abs(x) - c) / w);
}

// Plane wave e^{−i ε^μ Θ⁻¹_{μν} x^ν}, windowed to the grid.
inline GridField translation_wave(const GridSpec& g, const std::array<double, 4>& eps, double theta,
                                  bool conjugate = false) {
  const double inner = 0.75 * g.extent;
  return sample(g, [&](const std::array<double, 4>& x) {
    double phase = 0.0, win = 1.0;
    for (int pr = 0; pr < g.dim / 2; ++pr) {
      const int a = 2 * pr, b = a + 1;
      phase += (eps[a] * x[b] - eps[b] * x[a]) / theta;
    }
    for (int a = 0; a < g.dim; ++a) win *= edge_window(x[a], inner, g.extent);
    return std::polar(win, conjugate ? -phase : phase);
  });
}

inline GridField star_translate(const GridField& f, const std::array<double, 4>& eps, double theta) {
  const GridField ge = translation_wave(f.spec, eps, theta);
  const GridField gd = translation_wave(f.spec, eps, theta, true);
  GridField out = star_grid(star_grid(ge, f, theta), gd, theta);
  out.warnings.clear();
  return out;
}

inline bool interior_node(const GridField& f, std::size_t i, double fraction = 0.5) {
  const auto idx = f.index(i);
  for (int a = 0; a < f.spec.dim; ++a)
    if (std::abs(f.spec.node(idx[a])) > fraction * f.spec.extent) return false;
  return true;
}

inline double interior_l2_distance(const GridField& a, const GridField& b, double fraction = 0.5) {
  require_same(a.spec, b.spec);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (interior_node(a, i, fraction)) s += std::norm(a[i] - b[i]);
  return std::sqrt(s * a.spec.cell_volume());
}

inline double star_translation_check(const GridField& f, const std::array<double, 4>& eps, double theta) {
  bool zero = true;
  for (int a = 0; a < f.spec.dim; ++a) zero = zero && eps[a] == 0.0;
  if (zero) return 0.0;
  return interior_l2_distance(star_translate(f, eps, theta), spectral_shift(f, eps));
}

namespace detail {

// (Fφ)(x) = (πθ)^{-1} ∫ e^{−i x̃·y} φ(y) dy on a single D=2 slice (row-major M×M, in place).
struct DualityKernel {
  Matrix u, v;
  DualityKernel(const GridSpec& g, double theta) : u(g.points, g.points), v(g.points, g.points) {
    const double scale = g.spacing() / std::sqrt(std::numbers::pi * theta);
    for (int i = 0; i < g.points; ++i)
      for (int j = 0; j < g.points; ++j) {
        const double xy = g.node(i) * g.node(j);
        u(i, j) = std::polar(scale, -2.0 * xy / theta);
        v(i, j) = std::polar(scale, 2.0 * xy / theta);
      }
  }
  void apply(cplx* slice, int m) const {
    Eigen::Map<RowMat> phi(slice, m, m);
    RowMat out = u * phi.transpose() * v.transpose();
    phi = out;
  }
};

}  // namespace detail

inline GridField duality_map_grid(const GridField& f, double theta) {
  const GridSpec& g = f.spec;
  const detail::DualityKernel ker(g, theta);
  const int m = g.points;
  const std::size_t m2 = static_cast<std::size_t>(m) * m;
  GridField out = f;
  if (g.dim == 2) {
    ker.apply(out.values.data(), m);
    return out;
  }
  std::vector<cplx> slice(m2);
  for (std::size_t x34 = 0; x34 < m2; ++x34) {
    for (std::size_t x12 = 0; x12 < m2; ++x12) slice[x12] = out[x12 * m2 + x34];
    ker.apply(slice.data(), m);
    for (std::size_t x12 = 0; x12 < m2; ++x12) out[x12 * m2 + x34] = slice[x12];
  }
  for (std::size_t x12 = 0; x12 < m2; ++x12) ker.apply(out.values.data() + x12 * m2, m);
  return out;
}

inline void write_grid_binary(const std::string& path, const GridField& f, double theta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  const std::int32_t dim = f.spec.dim, m = f.spec.points;
  os.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  os.write(reinterpret_cast<const char*>(&m), sizeof m);
  os.write(reinterpret_cast<const char*>(&f.spec.extent), sizeof(double));
  os.write(reinterpret_cast<const char*>(&theta), sizeof(double));
  os.write(reinterpret_cast<const char*>(f.values.data()), static_cast<std::streamsize>(f.size() * sizeof(cplx)));
}

inline GridField read_grid_binary(const std::string& path, double* theta = nullptr) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::int32_t dim = 0, m = 0;
  double extent = 0.0, th = 0.0;
  is.read(reinterpret_cast<char*>(&dim), sizeof dim);
  is.read(reinterpret_cast<char*>(&m), sizeof m);
  is.read(reinterpret_cast<char*>(&extent), sizeof extent);
  is.read(reinterpret_cast<char*>(&th), sizeof th);
  GridSpec g{dim, extent, m};
  g.validate();
  GridField f(g);
  is.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(f.size() * sizeof(cplx)));
  if (!is) throw std::runtime_error("truncated grid file " + path);
  if (theta) *theta = th;
  return f;
}

inline void write_grid_csv(const std::string& path, const GridField& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << std::setprecision(17);
  for (int a = 0; a < f.spec.dim; ++a) os << 'x' << a + 1 << ',';
  os << "re,im\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = f.index(i);
    for (int a = 0; a < f.spec.dim; ++a) os << f.spec.node(idx[a]) << ',';
    os << f[i].real() << ',' << f[i].imag() << '\n';
  }
}

}  // namespace moyal
