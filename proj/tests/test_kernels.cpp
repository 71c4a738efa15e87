#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "decaylab/kernels.hpp"

using namespace decaylab;

namespace {

struct Setup {
  EllipticOperator op;
  DistanceField dist;
  EigenSystem eig;
};

Setup laplacian(Generator g, std::vector<double> params, double h, std::optional<std::size_t> m = std::nullopt) {
  auto dom = std::make_shared<const GridDomain>(build_domain(DomainSpec{g, std::move(params), h, {}, 20000}));
  auto op = assemble_weighted_laplacian(dom);
  auto dist = distance_to_boundary(*dom);
  auto eig = eigensolve(op, m);
  return {std::move(op), std::move(dist), std::move(eig)};
}

constexpr double pi = std::numbers::pi;

// Unit-square Dirichlet lattice eigenvalues below `lambda`, from the product formula.
std::size_t square_lattice_count(double h, double lambda) {
  const int n = static_cast<int>(std::lround(1.0 / h));
  std::size_t count = 0;
  for (int a = 1; a < n; ++a)
    for (int b = 1; b < n; ++b) {
      const double v = 4.0 / (h * h) * (std::pow(std::sin(a * pi * h / 2), 2) + std::pow(std::sin(b * pi * h / 2), 2));
      count += v < lambda;
    }
  return count;
}

}  // namespace

TEST(HeatStripMass, WideStripIsTheTrace) {
  const auto s = laplacian(Generator::lshape, {2.0}, 0.1);
  for (double t : {0.01, 0.1}) {
    const auto m = heat_strip_mass(s.eig, s.dist, 10.0, t);
    EXPECT_NEAR(m.j, heat_trace(s.eig, t), 1e-10 * m.j);
    EXPECT_LE(heat_strip_mass(s.eig, s.dist, 0.25, t).j, m.trace);
  }
  EXPECT_EQ(heat_strip_mass(s.eig, s.dist, 0.01, 0.1).j, 0.0);
}

TEST(HeatStripMass, LongTimeGroundStateDominance) {
  const auto iv = laplacian(Generator::interval, {1.0}, 1.0 / 64);
  const double t14 = 14.0 / (iv.eig.lambda(1) - iv.eig.lambda(0));
  EXPECT_NEAR(heat_strip_mass(iv.eig, iv.dist, 10.0, t14).j / std::exp(-iv.eig.lambda(0) * t14), 1.0, 1e-6);

  const auto s = laplacian(Generator::disk, {1.0}, 0.1);
  const double t = 20.0 / (s.eig.lambda(1) - s.eig.lambda(0));
  const double eps = 0.3;
  double ground = 0.0;
  for (auto x : strip_indices(s.dist, eps)) ground += std::pow(s.eig.phi(0)[static_cast<Eigen::Index>(x)], 2) * s.eig.measure[static_cast<Eigen::Index>(x)];
  ground *= std::exp(-s.eig.lambda(0) * t);
  EXPECT_NEAR(heat_strip_mass(s.eig, s.dist, eps, t).j / ground, 1.0, 1e-6);
}

TEST(HeatStripMass, IntervalAgainstContinuumSeries) {
  const double h = 1.0 / 256, t = 0.05;
  const auto s = laplacian(Generator::interval, {1.0}, h);
  const double eps = (std::floor(0.1 / h - 0.5) + 0.5) * h;
  double series = 0.0;
  for (int k = 1; k < 400; ++k)
    series += std::exp(-k * k * pi * pi * t) * (2.0 * eps - std::sin(2.0 * k * pi * eps) / (k * pi));
  EXPECT_NEAR(heat_strip_mass(s.eig, s.dist, eps, t).j / series, 1.0, 0.02);
}

TEST(HeatStripMass, TruncationRefused) {
  const auto s = laplacian(Generator::rectangle, {1.0, 1.0}, 1.0 / 24, 20);
  try {
    heat_strip_mass(s.eig, s.dist, 0.1, 1e-4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::numerical);
  }
  EXPECT_NO_THROW(heat_strip_mass(s.eig, s.dist, 0.1, 1.0));
}

TEST(StripHeatBound, ChainAndExponents) {
  const double h = 1.0 / 48;
  const auto s = laplacian(Generator::rectangle, {1.0, 1.0}, h, 120);
  std::vector<double> eps;
  for (double k : {1.5, 2.5, 4.5, 8.5, 12.5}) eps.push_back(k * h);
  const auto r = verify_ker2(s.op, s.eig, s.dist, eps, {0.1, 0.5, 1.0});
  ASSERT_EQ(r.reports.size(), 15u);
  for (const auto& rep : r.reports) {
    EXPECT_LE(rep.ratio, 1.0) << rep.t << " " << rep.eps;
    EXPECT_LE(rep.j, rep.trace);
    double sum = 0.0;
    for (std::size_t n = 0; n < s.eig.count(); ++n) sum += std::exp(-s.eig.lambda(n) * rep.t) * std::pow(s.eig.lambda(n), 1.5);
    EXPECT_NEAR(rep.bound, 8.0 * std::pow(rep.eps, 3) * sum, 1e-9 * rep.bound);
  }
  ASSERT_EQ(r.eps_fits.size(), 3u);
  EXPECT_EQ(r.eps_fits[0].first, 0.1);
  EXPECT_GE(r.eps_fits[0].second.exponent, 2.9);
  EXPECT_GT(r.c4_hat, 0.0);
  EXPECT_THROW(verify_ker2(s.op, s.eig, s.dist, eps, {1.5}), Error);
  EXPECT_THROW(verify_ker2(s.op, s.eig, s.dist, eps, {0.0}), Error);
}

TEST(StripHeatBound, IntervalTimeExponent) {
  const double h = 1.0 / 1024;
  const auto s = laplacian(Generator::interval, {1.0}, h);
  const double eps = 10.5 * h;
  std::vector<std::pair<double, double>> pts;
  for (double t : {0.01, 0.02, 0.04, 0.08}) pts.emplace_back(t, heat_strip_mass(s.eig, s.dist, eps, t).j);
  EXPECT_NEAR(fit_exponent(pts).exponent, -1.5, 0.1);
}

TEST(SingleSourceBound, HoldsAtResolvedTimes) {
  const double h = 1.0 / 128;
  const auto s = laplacian(Generator::interval, {1.0}, h);
  const std::vector<std::size_t> ys{10, 63, 120};
  for (double t : {0.005, 0.02, 0.1})
    for (double eps : {2.5 * h, 10.5 * h, 20.5 * h})
      for (const auto& r : verify_ker1(s.op, s.eig, s.dist, eps, t, ys)) EXPECT_TRUE(r.pass) << t << " " << eps << " " << r.ratio;
  EXPECT_THROW(verify_ker1(s.op, s.eig, s.dist, 0.1, 10 * h * h, ys), Error);
  const auto part = laplacian(Generator::interval, {1.0}, h, 5);
  EXPECT_THROW(verify_ker1(part.op, part.eig, part.dist, 0.1, 0.1, ys), Error);
}

TEST(SingleSourceBound, ConstantFormula) {
  // c0 (4 pi)^{-N/2} sup_x x e^{-x/2} sup_x x^{1/c} e^{-x/2}, sups by direct search
  for (double c : {2.0, 4.0})
    for (int n : {1, 2}) {
      double s1 = 0.0, s2 = 0.0;
      for (double x = 1e-4; x < 50.0; x += 1e-4) {
        s1 = std::max(s1, x * std::exp(-x / 2));
        s2 = std::max(s2, std::pow(x, 1.0 / c) * std::exp(-x / 2));
      }
      EXPECT_NEAR(ker1_constant(c, n), constant_c0(c) * std::pow(4 * pi, -0.5 * n) * s1 * s2, 1e-6 * ker1_constant(c, n));
    }
  EXPECT_NEAR(lattice_margin(0.1, 1.0, 2), std::pow(1.0 + 0.01 / 8, 2), 1e-15);
}

TEST(Ultracontractive, DiagonalBelowFreeKernel) {
  const double h = 1.0 / 32;
  const auto s = laplacian(Generator::rectangle, {1.0, 1.0}, h);
  for (double t : {20 * h * h, 0.05, 0.2}) {
    const auto r = verify_ultracontractive(s.eig, t, 2, h);
    EXPECT_TRUE(r.pass) << t << " " << r.ratio;
  }
  EXPECT_THROW(verify_ultracontractive(s.eig, 5 * h * h, 2, h), Error);
}

TEST(Halfline, ReferenceValues) {
  const auto r = halfline_reference(0.1, 1.0);
  EXPECT_NEAR(r.asymptotic, 9.4032e-5, 1e-8);
  EXPECT_NEAR(r.exact / r.asymptotic, 1.0, 0.01);
  // small-x expansion of 1 - e^{-x^2/t}
  for (double eps : {0.001, 0.01, 0.05})
    for (double t : {0.5, 1.0, 3.0}) {
      const double series = std::pow(4 * pi * t, -0.5) *
                            (std::pow(eps, 3) / (3 * t) - std::pow(eps, 5) / (10 * t * t) + std::pow(eps, 7) / (42 * t * t * t));
      EXPECT_NEAR(halfline_reference(eps, t).exact / series, 1.0, 1e-8);
    }
  // large eps^2/t: the asymptotic form overshoots
  const auto wide = halfline_reference(3.0, 0.1);
  EXPECT_LT(wide.exact / wide.asymptotic, 0.5);
  EXPECT_THROW(halfline_reference(0.0, 1.0), Error);
}

TEST(Halfline, DiffusiveScalingInvariance) {
  for (double k : {0.5, 2.0, 7.0}) {
    const auto a = halfline_reference(0.05, 0.2), b = halfline_reference(k * 0.05, k * k * 0.2);
    EXPECT_NEAR(b.exact / a.exact, 1.0, 1e-10);
    EXPECT_NEAR(b.asymptotic / a.asymptotic, 1.0, 1e-12);
  }
}

TEST(WeylBracket, IntervalLowModesNearPiSquared) {
  const auto s = laplacian(Generator::interval, {1.0}, 1.0 / 256);
  const auto low = weyl_bracket(s.eig, 1, 0.15);
  EXPECT_EQ(low.admitted, static_cast<std::size_t>(std::floor(0.15 * 255)));
  EXPECT_NEAR(low.a1 / (pi * pi), 1.0, 0.03);
  EXPECT_NEAR(low.a2 / (pi * pi), 1.0, 0.03);
  const auto wide = weyl_bracket(s.eig, 1);
  EXPECT_LE(wide.a1, s.eig.lambda(0));
  EXPECT_GE(wide.a2, s.eig.lambda(0));
  EXPECT_LE(wide.a1, low.a1);
}

TEST(WeylBracket, SquareSpread) {
  const auto s = laplacian(Generator::rectangle, {1.0, 1.0}, 1.0 / 32, 60);
  const auto w = weyl_bracket(s.eig, 2);
  EXPECT_EQ(w.admitted, 60u);
  EXPECT_LE(w.a2 / w.a1, 3.0);
  EXPECT_LE(w.a1, s.eig.lambda(0));
  EXPECT_GE(w.a2, s.eig.lambda(0));
  const auto few = laplacian(Generator::interval, {1.0}, 1.0 / 8);
  EXPECT_THROW(weyl_bracket(few.eig, 1), Error);
  EXPECT_THROW(weyl_bracket(s.eig, 3), Error);
}

TEST(SpectralCounting, SquareBoundAndSaturation) {
  const double h = 1.0 / 64;
  const auto s = laplacian(Generator::rectangle, {1.0, 1.0}, h, 30);
  const auto r = verify_thm16(s.op, s.eig, s.dist, 0.05, 60.0);
  EXPECT_EQ(static_cast<std::size_t>(r.param("N")), square_lattice_count(h, 60.0));
  EXPECT_EQ(r.param("N"), 3.0);
  EXPECT_LE(r.ratio, 1.0);

  const auto below = verify_thm16(s.op, s.eig, s.dist, 0.05, 0.5 * s.eig.lambda(0));
  EXPECT_TRUE(below.vacuous && below.pass);

  const auto full = verify_thm16(s.op, s.eig, s.dist, 1.0, 60.0);
  EXPECT_NEAR(full.lhs, 3.0, 1e-9);
  EXPECT_TRUE(full.pass);

  for (double lambda : {3.5 * pi * pi, 9 * pi * pi, 17.5 * pi * pi}) {
    const auto a = verify_thm16(s.op, s.eig, s.dist, 0.05, lambda);
    EXPECT_EQ(static_cast<std::size_t>(a.param("N")), square_lattice_count(h, lambda));
    EXPECT_LE(a.ratio, 1.0);
    const auto p = verify_projection_norm(s.op, s.eig, s.dist, 0.05, lambda);
    EXPECT_LE(p.ratio, 1.0);
    EXPECT_LE(p.lhs, 1.0 + 1e-12);
    EXPECT_LE(p.lhs, a.lhs + 1e-12);
  }
  EXPECT_THROW(verify_thm16(s.op, s.eig, s.dist, 0.05, 1e5), Error);
}

TEST(SpectralCounting, MonotoneInEpsAndLambda) {
  const auto s = laplacian(Generator::disk, {1.0}, 0.1);
  double prev = 0.0;
  for (double eps : {0.1, 0.2, 0.4, 0.8}) {
    const double v = strip_counting(s.eig, strip_indices(s.dist, eps), 100.0);
    EXPECT_GE(v, prev);
    EXPECT_LE(v, double(counting(s.eig, 100.0)) + 1e-10);
    prev = v;
  }
  prev = 0.0;
  for (double lambda : {20.0, 50.0, 100.0, 200.0}) {
    const double v = strip_counting(s.eig, strip_indices(s.dist, 0.2), lambda);
    EXPECT_GE(v, prev);
    prev = v;
  }
}
