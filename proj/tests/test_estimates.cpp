#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "decaylab/estimates.hpp"

using namespace decaylab;

namespace {

struct Setup {
  EllipticOperator op;
  DistanceField dist;
  EigenSystem eig;
};

Setup laplacian(Generator g, std::vector<double> params, double h) {
  auto dom = std::make_shared<const GridDomain>(build_domain(DomainSpec{g, std::move(params), h, {}, 20000}));
  auto op = assemble_weighted_laplacian(dom);
  auto dist = distance_to_boundary(*dom);
  auto eig = eigensolve(op);
  return {std::move(op), std::move(dist), std::move(eig)};
}

DistanceField field(std::vector<double> d) {
  DistanceField f;
  f.values = Eigen::Map<Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
  return f;
}

}  // namespace

TEST(Weights, Examples) {
  const auto d = field({0.5, 0.05, 0.1, 0.2, 0.35, 0.15, 0.3});
  EXPECT_NEAR(weight_omega(d, 0.25, 2.0)[0], 1.41421356, 1e-8);
  EXPECT_NEAR(weight_omega(d, 0.25, 2.0)[1], std::pow(0.25, -0.5), 1e-12);

  const auto tau = weight_tau(d, 0.1, 2.0);
  EXPECT_NEAR(tau[1], 3.16227766, 1e-8);
  EXPECT_NEAR(tau[2], 3.16227766, 1e-8);
  EXPECT_NEAR(tau[3], 1.58113883, 1e-8);
  EXPECT_EQ(tau[4], 0.0);

  const auto mu = cutoff_mu(d, 0.1);
  EXPECT_EQ(mu[1], 0.0);
  EXPECT_EQ(mu[2], 0.0);
  EXPECT_NEAR(mu[5], 0.5, 1e-15);
  EXPECT_EQ(mu[6], 1.0);

  EXPECT_THROW(weight_omega(d, 0.0, 2.0), Error);
  EXPECT_THROW(weight_tau(d, 0.1, 1.0), Error);
  EXPECT_THROW(cutoff_mu(d, -1.0), Error);
}

TEST(Weights, TauIsContinuousAndBelowOmega) {
  for (double c : {2.0, 3.0, 4.0}) {
    const double eps = 0.07;
    EXPECT_NEAR(tau_value(eps * (1 - 1e-12), eps, c), tau_value(eps * (1 + 1e-12), eps, c), 1e-8);
    EXPECT_NEAR(tau_value((1 + c) * eps * (1 - 1e-12), eps, c), 0.0, 1e-8);
    for (double d = 0.001; d < 1.0; d += 0.013) EXPECT_LE(tau_value(d, eps, c), std::pow(std::max(d, eps), -1.0 / c) + 1e-12);
  }
}

TEST(Weights, LatticeGradientBounds) {
  const auto s = laplacian(Generator::lshape, {2.0}, 0.05);
  const double eps = 0.2;
  for (double c : {2.0, 4.0}) {
    const double slope = std::pow(eps, -1.0 - 1.0 / c) / c;
    const auto g = weight_gradient_squared(s.op, s.dist, [eps, c](double d) { return tau_value(d, eps, c); });
    // per-axis differences of d are at most h, two axes
    EXPECT_LE(g.maxCoeff(), 2.0 * slope * slope * (1 + 1e-12));
    const auto gm = weight_gradient_squared(s.op, s.dist, [eps](double d) { return mu_value(d, eps); });
    EXPECT_LE(gm.maxCoeff(), 2.0 / (eps * eps) * (1 + 1e-12));
  }
}

TEST(Constants, Values) {
  EXPECT_DOUBLE_EQ(constant_c0(2.0), 8.0);
  EXPECT_NEAR(constant_c0(4.0), 32.0, 1e-12);
  EXPECT_NEAR(constant_c1(2.0), 56.0, 1e-12);
  EXPECT_NEAR(constant_c1(4.0), 2.0 + 2.0 * std::pow(5.0, 2.5), 1e-10);
  EXPECT_NEAR(constant_c1(4.0), 113.8, 0.01);
  EXPECT_NEAR(constant_c2(2.0), 4.0 * 56.0 + 16.0 * 8.0, 1e-10);
  EXPECT_NEAR(constant_c3(2.0), std::sqrt(8.0 * 8.0), 1e-12);
}

TEST(FitExponent, SyntheticPowerLaws) {
  std::vector<std::pair<double, double>> pts;
  for (double e = 0.2; e > 0.01; e *= 0.5) pts.emplace_back(e, 3.0 * std::pow(e, 2.5));
  const auto fit = fit_exponent(pts);
  EXPECT_NEAR(fit.exponent, 2.5, 1e-12);
  EXPECT_NEAR(fit.log_constant, std::log(3.0), 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_EQ(fit.points, pts.size());

  // window restriction drops the outlier
  pts.emplace_back(0.001, 1.0);
  const auto win = fit_exponent(pts, 0.01);
  EXPECT_NEAR(win.exponent, 2.5, 1e-12);
  EXPECT_EQ(win.points, pts.size() - 1);

  EXPECT_THROW(fit_exponent({{0.1, 1.0}, {0.2, 2.0}, {0.3, 3.0}}), Error);
  EXPECT_THROW(fit_exponent({{0.1, 1.0}, {0.2, -2.0}, {0.3, 3.0}, {0.4, 4.0}}), Error);
}

TEST(EpsSchedule, GeometricCellCentred) {
  const auto s = laplacian(Generator::interval, {1.0}, 1.0 / 256);
  const double h = 1.0 / 256;
  const auto eps = eps_schedule(s.dist, h, {0.5, 1.5, 0.0, EpsSnap::cell_center});
  ASSERT_GE(eps.size(), 4u);
  EXPECT_LE(eps.front(), 0.1 + 1e-12);
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const double cells = eps[k] / h - 0.5;
    EXPECT_NEAR(cells, std::round(cells), 1e-9);
    EXPECT_GE(eps[k], 1.5 * h * (1 - 1e-12));
    if (k) {
      EXPECT_LT(eps[k], eps[k - 1]);
    }
  }
  EXPECT_THROW(eps_schedule(s.dist, h, {1.5, 1.0, 0.0, EpsSnap::none}), Error);
}

TEST(HardyInequality, HoldsForTestVectors) {
  for (auto s : {laplacian(Generator::interval, {1.0}, 1.0 / 128), laplacian(Generator::disk, {1.0}, 0.1),
                 laplacian(Generator::lshape, {2.0}, 0.1)}) {
    for (const auto& f : random_domain_vectors(s.op, s.eig, 4, 11)) {
      const auto r = verify_hi(s.op, s.dist, f);
      EXPECT_TRUE(r.pass) << s.op.domain->name << " ratio " << r.ratio;
      double lhs = 0.0;
      for (Eigen::Index i = 0; i < f.size(); ++i) lhs += f[i] * f[i] * s.op.measure[i] / std::pow(s.dist.values[i], 2);
      EXPECT_NEAR(r.lhs, lhs, 1e-10 * lhs);
    }
  }
  const auto s = laplacian(Generator::interval, {1.0}, 0.25);
  EXPECT_THROW(verify_hi(s.op, s.dist, Eigen::VectorXd::Zero(3)), Error);
}

TEST(StripBounds, IntervalGroundStateClosedForm) {
  const double h = 1.0 / 256;
  const auto s = laplacian(Generator::interval, {1.0}, h);
  const double l1 = s.eig.lambda(0);
  for (int k : {2, 5, 10, 25}) {
    const double eps = (k + 0.5) * h;
    const auto r = verify_thm4(s.op, s.eig, s.dist, Eigen::VectorXd(s.eig.phi(0)), eps);
    // discrete eigenvector is sqrt(2) sin(pi x) up to normalisation, both ends contribute
    double mass = 0.0;
    for (int i = 1; i <= k; ++i) mass += 2.0 * 2.0 * std::pow(std::sin(std::numbers::pi * i * h), 2) * h;
    EXPECT_NEAR(r.strip_mass.lhs, mass, 1e-9 * mass);
    EXPECT_NEAR(r.strip_mass.rhs, 8.0 * std::pow(eps, 3) * std::pow(l1, 1.5), 1e-9 * r.strip_mass.rhs);
    EXPECT_TRUE(r.strip_mass.pass);
    EXPECT_TRUE(r.strip_d2.pass);
    // continuum: 4 int_0^eps sin^2(pi x) dx ~ (4 pi^2 / 3) eps^3
    const double continuum = 2.0 * eps - std::sin(2.0 * std::numbers::pi * eps) / std::numbers::pi;
    EXPECT_NEAR(mass / continuum, 1.0, 0.1);
    EXPECT_NEAR(continuum / (4.0 * std::numbers::pi * std::numbers::pi / 3.0 * std::pow(eps, 3)), 1.0, 0.05);

    const auto e = verify_eigenfunction(s.op, s.eig, s.dist, 0, eps);
    EXPECT_NEAR(e.mass.lhs, mass, 1e-9 * mass);
    EXPECT_NEAR(e.mass.rhs, 8.0 * std::pow(eps, 3) * std::pow(l1, 1.5), 1e-9 * e.mass.rhs);
    EXPECT_NEAR(e.interpolation.rhs, 4.0 * eps * eps * l1, 1e-9);
    EXPECT_TRUE(e.mass.pass && e.grad.pass && e.interpolation.pass && e.trivial.pass);
  }
}

TEST(StripBounds, ChainAndMonotoneInEps) {
  const auto s = laplacian(Generator::slit_square, {1.0, 0.5}, 1.0 / 24);
  const auto vecs = random_domain_vectors(s.op, s.eig, 3, 5);
  for (const auto& f : vecs) {
    double prev_mass = 0.0, prev_grad = 0.0;
    for (double eps : {0.05, 0.1, 0.2, 0.3}) {
      const auto r = verify_thm4(s.op, s.eig, s.dist, f, eps);
      const auto g = verify_thm6(s.op, s.eig, s.dist, f, eps);
      EXPECT_GE(r.strip_d2.lhs * eps * eps, r.strip_mass.lhs * (1 - 1e-12));
      EXPECT_GE(r.strip_mass.lhs, prev_mass);
      EXPECT_GE(g.lhs, prev_grad);
      EXPECT_TRUE(r.strip_mass.pass && r.strip_d2.pass && g.pass);
      EXPECT_NEAR(r.strip_mass.rhs / r.strip_d2.rhs, eps * eps, 1e-12);
      prev_mass = r.strip_mass.lhs;
      prev_grad = g.lhs;
    }
    EXPECT_LE(prev_grad, quadratic_form(s.op, f) * (1 + 1e-12));
  }
}

TEST(SingularWeight, ClosedFormIntegralAndBound) {
  const auto s = laplacian(Generator::interval, {1.0}, 1.0 / 128);
  const Eigen::VectorXd f = s.eig.phi(0);
  const auto r = verify_cor5(s.op, s.eig, s.dist, f, 1.0, 0.5);
  double err = 0.0;
  const double quad = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [](double x) { return x; }, 0.0, 0.5, 5, 1e-14, &err);
  EXPECT_NEAR(r.param("s_integral"), quad, 1e-14);
  EXPECT_NEAR(r.param("s_integral"), 0.125, 1e-15);
  for (double gamma : {0.5, 1.0, 2.0}) EXPECT_TRUE(verify_cor5(s.op, s.eig, s.dist, f, gamma, 0.5).pass);
  EXPECT_THROW(verify_cor5(s.op, s.eig, s.dist, f, 3.0, 0.5), Error);
  EXPECT_THROW(verify_cor5(s.op, s.eig, s.dist, f, 1e-4, 0.5), Error);
  EXPECT_THROW(verify_cor5(s.op, s.eig, s.dist, f, 1.0, 0.0), Error);
  EXPECT_THROW(verify_cor5(s.op, s.eig, s.dist, f, 1.0, 0.7), Error);
}

TEST(CommutatorAndCutoff, HoldOnRandomVectors) {
  const auto s = laplacian(Generator::disk, {1.0}, 0.1);
  for (const auto& f : random_domain_vectors(s.op, s.eig, 3, 9))
    for (double eps : {0.05, 0.1, 0.2}) {
      for (double shift : {0.0, 1.0}) EXPECT_TRUE(verify_lemma1(s.op, s.eig, s.dist, f, eps, shift).pass);
      EXPECT_TRUE(verify_lemma3(s.op, s.eig, s.dist, f, eps).pass);
      EXPECT_TRUE(verify_lemma2(s.op, s.dist, [eps](double d) { return mu_value(d, eps); }, f, "mu").pass);
      EXPECT_TRUE(verify_lemma2(s.op, s.dist, [eps](double d) { return tau_value(d, eps, 2.0); }, f, "tau").pass);
    }
}

TEST(ModelProfile, StripMassMatchesClosedForm) {
  const auto op = assemble_1d_weighted(0.5, 3.0, 1.0 / 512);
  const auto dist = distance_to_boundary(*op.domain);
  const auto f = example5_function(op);
  const double h = op.domain->h;
  for (double target : {0.02, 0.05, 0.1, 0.2}) {
    // strip edges halfway between nodes
    const double eps = (std::floor(target / h - 0.5) + 0.5) * h;
    const auto [d2, mass] = strip_integrals(op, dist, f, eps);
    EXPECT_NEAR(mass / (std::pow(eps, 2.5) / 2.5), 1.0, 0.01) << eps;
    EXPECT_GT(d2, mass / (eps * eps));
  }
  EXPECT_TRUE(verify_hi(op, dist, f).pass);
  EXPECT_DOUBLE_EQ(example5_profile(0.5, 0.5), std::sqrt(0.5));
  EXPECT_EQ(example5_profile(2.5, 0.5), 0.0);
  EXPECT_NEAR(example5_profile(1.5, 0.5), std::pow(1.5, 0.5) * 0.5, 1e-12);
}

TEST(Reports, MakeReport) {
  const auto r = make_report("x", 1.0, 2.0, 0.1, {{"eps", 0.5}});
  EXPECT_DOUBLE_EQ(r.ratio, 0.5);
  EXPECT_TRUE(r.pass);
  EXPECT_DOUBLE_EQ(r.param("eps"), 0.5);
  EXPECT_TRUE(std::isnan(r.param("nope")));
  EXPECT_FALSE(make_report("x", 2.3, 2.0, 0.1).pass);
  EXPECT_TRUE(make_report("x", 0.0, 0.0, 0.0).vacuous);
  EXPECT_THROW(make_report("x", 1.0, 0.0, 0.0), Error);
  EXPECT_THROW(make_report("x", std::nan(""), 1.0, 0.0), Error);
}
