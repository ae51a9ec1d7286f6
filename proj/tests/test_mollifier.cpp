#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "moyal/mollifier.hpp"

using namespace moyal;

namespace {

// Values pinned from the radial and cube quadratures before the library existed.
constexpr double kC1 = 2.2522836210435813;
constexpr double kC2 = 2.143565775792237;
constexpr double kC3 = 2.2671167396083267;

double step(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? 0.0 : 0.5); }

// Romberg on [a, b] for a smooth integrand.
double romberg(const std::function<double(double)>& f, double a, double b, int levels = 18) {
  std::vector<double> prev(1, 0.5 * (b - a) * (f(a) + f(b)));
  for (int k = 1; k < levels; ++k) {
    const int n = 1 << (k - 1);
    const double hk = (b - a) / (2 * n);
    double mid = 0.0;
    for (int i = 0; i < n; ++i) mid += f(a + (2 * i + 1) * hk);
    std::vector<double> cur(k + 1);
    cur[0] = 0.5 * prev[0] + hk * mid;
    for (int j = 1; j <= k; ++j) cur[j] = cur[j - 1] + (cur[j - 1] - prev[j - 1]) / (std::pow(4.0, j) - 1.0);
    prev = cur;
  }
  return prev.back();
}

}  // namespace

TEST(Bump, SupportAndCentre) {
  const auto s = MollifierSpec::make(2, 0.5);
  const std::array<double, 2> edge{0.6, 0.8}, out{1.0, 0.5}, zero{0.0, 0.0};
  EXPECT_EQ(bump(edge, s), 0.0);
  EXPECT_EQ(bump(out, s), 0.0);
  EXPECT_DOUBLE_EQ(bump(zero, s), s.c * std::exp(-1.0));
  EXPECT_EQ(bump(1.0 - 1e-13, MollifierSpec::make(1, 0.5)), 0.0);
  EXPECT_GT(bump(0.999, MollifierSpec::make(1, 0.5)), 0.0);
}

TEST(Bump, Radial) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto s = MollifierSpec::make(3, 0.2);
  for (int t = 0; t < 100; ++t) {
    const std::array<double, 3> a{u(rng), u(rng), u(rng)}, b{-a[0], -a[1], -a[2]};
    EXPECT_EQ(bump(a, s), bump(b, s));
  }
}

TEST(Normalization, PinnedValues) {
  EXPECT_NEAR(normalization_c(1), kC1, 1e-12);
  EXPECT_NEAR(normalization_c(2), kC2, 1e-12);
  EXPECT_NEAR(normalization_c(3), kC3, 1e-12);
  EXPECT_THROW(normalization_c(4), DomainError);
}

TEST(Normalization, IndependentRadialRomberg) {
  auto profile = [](double r2) { return 1.0 - r2 < kExponentFloor ? 0.0 : std::exp(1.0 / (r2 - 1.0)); };
  const double i1 = 2.0 * romberg([&](double r) { return profile(r * r); }, 0.0, 1.0);
  const double i2 = 2.0 * std::numbers::pi * romberg([&](double r) { return r * profile(r * r); }, 0.0, 1.0);
  const double i3 = 4.0 * std::numbers::pi * romberg([&](double r) { return r * r * profile(r * r); }, 0.0, 1.0);
  EXPECT_NEAR(normalization_c(1) * i1, 1.0, 1e-10);
  EXPECT_NEAR(normalization_c(2) * i2, 1.0, 1e-10);
  EXPECT_NEAR(normalization_c(3) * i3, 1.0, 1e-10);
}

TEST(Normalization, ScaledKernelHasUnitMass) {
  for (double h : {0.5, 0.1, 0.02}) {
    EXPECT_NEAR(romberg([&](double x) { return omega_h(x, h); }, -h, h), 1.0, 1e-10);
  }
}

TEST(Spec, Validation) {
  EXPECT_THROW(MollifierSpec::make(1, 0.0), DomainError);
  EXPECT_THROW(MollifierSpec::make(1, 1.0), DomainError);
  EXPECT_THROW(MollifierSpec::make(0, 0.5), DomainError);
  const auto s = MollifierSpec::make(2, 0.5);
  const std::array<double, 1> wrong{0.0};
  EXPECT_THROW(bump(wrong, s), ShapeError);
}

TEST(SmoothedSign, ShapeAndDerivative) {
  const double h = 0.1;
  EXPECT_EQ(eps_h(0.0, h), 0.0);
  EXPECT_NEAR(eps_h(h, h), 1.0, 1e-13);
  EXPECT_EQ(eps_h(2.0 * h, h), 1.0);
  EXPECT_EQ(eps_h(-0.5, h), -1.0);
  for (double x : {-0.07, -0.02, 0.01, 0.05, 0.093}) {
    EXPECT_DOUBLE_EQ(eps_h(-x, h), -eps_h(x, h));
    const double d = 1e-5;
    EXPECT_NEAR((eps_h(x + d, h) - eps_h(x - d, h)) / (2.0 * d), 2.0 * omega_h(x, h), 1e-6);
  }
}

TEST(Smooth, ConstantExact) {
  const auto f = Sampled1D::sample(-1.0, 1.0, 401, [](double) { return 3.25; });
  const auto g = smooth(f, 0.1);
  for (double v : g.values) EXPECT_EQ(v, 3.25);
}

TEST(Smooth, LinearOnInterior) {
  const auto f = Sampled1D::sample(-1.0, 1.0, 401, [](double x) { return 2.0 * x - 0.3; });
  const double h = 0.1;
  const auto g = smooth(f, h);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g.node(i)) < 1.0 - h) EXPECT_NEAR(g.values[i], f.values[i], 1e-10);
}

TEST(Smooth, StepIsHalfAtJumpAndMonotone) {
  const auto f = Sampled1D::sample(-1.0, 1.0, 2001, step);
  const auto g = smooth(f, 0.1);
  EXPECT_NEAR(g.values[1000], 0.5, 1e-6);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GE(g.values[i], g.values[i - 1] - 1e-15);
  // continuum oracle: L_h(x) = ½(1 + ε_h(x))
  for (std::size_t i = 900; i <= 1100; i += 20)
    EXPECT_NEAR(g.values[i], 0.5 * (1.0 + eps_h(g.node(i), 0.1)), 2e-3);
}

TEST(Smooth, LinearAndPositive) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Sampled1D a = Sampled1D::sample(0.0, 1.0, 301, [](double) { return 0.0; }), b = a;
  for (auto& v : a.values) v = u(rng);
  for (auto& v : b.values) v = u(rng);
  Sampled1D c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.values[i] = 2.0 * a.values[i] - 0.5 * b.values[i];
  const auto sa = smooth(a, 0.05), sb = smooth(b, 0.05), sc = smooth(c, 0.05);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR(sc.values[i], 2.0 * sa.values[i] - 0.5 * sb.values[i], 1e-13);
    EXPECT_GE(sa.values[i], 0.0);
  }
}

TEST(Smooth, ResolutionError) {
  const auto f = Sampled1D::sample(-1.0, 1.0, 41, step);
  EXPECT_THROW(smooth(f, 0.1), ResolutionError);
  EXPECT_THROW(smooth(f, 1.5), DomainError);
}

TEST(Smooth, GridConstantLinearPositive) {
  const GridSpec g{2, 1.0, 80};
  const GridField one = sample(g, [](const std::array<double, 4>&) { return cplx(1.5, -0.5); });
  for (const auto& v : smooth(one, 0.1).values) EXPECT_EQ(v, cplx(1.5, -0.5));
  const GridField lin = sample(g, [](const std::array<double, 4>& x) { return cplx(x[0] - 2.0 * x[1], 0.0); });
  const GridField sl = smooth(lin, 0.1);
  for (std::size_t i = 0; i < sl.size(); ++i) {
    const auto idx = sl.index(i);
    if (std::abs(g.node(idx[0])) < 0.85 && std::abs(g.node(idx[1])) < 0.85) EXPECT_NEAR(std::abs(sl[i] - lin[i]), 0.0, 1e-10);
  }
  const GridField bumpy = sample(g, [](const std::array<double, 4>& x) { return cplx(x[0] > 0.1 ? 1.0 : 0.0, 0.0); });
  for (const auto& v : smooth(bumpy, 0.1).values) EXPECT_GE(v.real(), 0.0);
  EXPECT_THROW(smooth(lin, 0.04), ResolutionError);
}

TEST(Scan, StepStrictlyDecreasing) {
  const auto f = Sampled1D::sample(-1.0, 1.0, 4001, step);
  const auto rows = convergence_scan(f, {0.2, 0.1, 0.05, 0.025});
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].l1_error, rows[i - 1].l1_error);
  EXPECT_GT(rows.back().l1_error, 0.0);
}

TEST(Scan, ConstantIsZero) {
  const auto f = Sampled1D::sample(-1.0, 1.0, 4001, [](double) { return -7.0; });
  for (const auto& r : convergence_scan(f, {0.2, 0.1, 0.05, 0.025})) EXPECT_EQ(r.l1_error, 0.0);
}

TEST(Scan, LipschitzBoundAndHalving) {
  struct Case {
    std::function<double(double)> f;
    double k;
  };
  const std::vector<Case> cases = {
      {[](double x) { return 3.0 * x + 1.0; }, 3.0},
      {[](double x) { return std::exp(-8.0 * x * x); }, 4.0 * std::exp(-0.5)},
      {[](double x) { return std::sin(5.0 * x); }, 5.0},
  };
  for (const auto& c : cases) {
    const auto f = Sampled1D::sample(-1.0, 1.0, 4001, c.f);
    const auto rows = convergence_scan(f, {0.2, 0.1, 0.05, 0.025}, c.k);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_LE(rows[i].l1_error, rows[i].lipschitz_bound);
      if (i > 0) EXPECT_LE(rows[i].l1_error, rows[i - 1].l1_error);
    }
  }
}

TEST(Scan, CsvExport) {
  const auto f = Sampled1D::sample(-1.0, 1.0, 2001, step);
  const auto rows = convergence_scan(f, {0.2, 0.1});
  EXPECT_NEAR(rows[0].lemma_constant, kC1 * std::exp(-1.0) / 0.2, 1e-12);
  const auto path = std::filesystem::temp_directory_path() / "moyal_scan.csv";
  write_scan_csv(path.string(), rows);
  std::ifstream is(path);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "h,l1_error,lipschitz_bound,lemma_constant");
  int n = 0;
  while (std::getline(is, line)) ++n;
  EXPECT_EQ(n, 2);
  std::filesystem::remove(path);
}
