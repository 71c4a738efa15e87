#pragma once

// Heat kernel mass near the boundary, the exact half-line reference, eigenvalue growth
// brackets and the spectral-density bound.

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "decaylab/estimates.hpp"

namespace decaylab {

struct HeatMass {
  double j = 0.0;           // sum_n e^{-lambda_n t} * strip mass of phi_n
  double trace = 0.0;       // sum_n e^{-lambda_n t} over the computed part
  double truncation = 0.0;  // bound on the omitted part of j
};

/// J = integral over {d < eps} of K(t,x,x); `dist` in the units eps is measured in.
inline HeatMass heat_strip_mass(const EigenSystem& eig, const DistanceField& dist, double eps, double t,
                                double max_relative_truncation = 1e-6) {
  detail::require(t > 0.0, "heat_strip_mass: t must be positive");
  detail::require(eps > 0.0, "heat_strip_mass: eps must be positive");
  const auto strip = strip_indices(dist, eps);
  HeatMass out;
  out.trace = heat_trace(eig, t);
  if (strip.empty()) return out;
  for (std::size_t n = 0; n < eig.count(); ++n) {
    double s = 0.0;
    for (auto x : strip) {
      const double v = eig.eigenvectors(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(n));
      s += v * v * eig.measure[static_cast<Eigen::Index>(x)];
    }
    out.j += std::exp(-eig.lambda(n) * t) * s;
  }
  out.truncation = truncation_tail(eig, t);
  detail::require(out.truncation <= max_relative_truncation * out.j,
                  "heat_strip_mass: spectral truncation too large at t=" + detail::fmt_num(t) +
                      "; increase resolution (more eigenpairs) or t",
                  ErrorKind::numerical);
  return out;
}

struct HeatReport {
  double t = 0.0;
  double eps = 0.0;
  double j = 0.0;
  double bound = 0.0;  // c0 eps^{2+2/c} sum e^{-lambda t} (lambda + a)^{1+1/c}
  double ratio = 0.0;
  double tol = 0.0;
  bool pass = true;
  double trace = 0.0;
  double truncation = 0.0;
};

struct Ker2Result {
  std::vector<HeatReport> reports;  // sorted by (t, eps)
  std::vector<std::pair<double, ExponentFit>> eps_fits;  // per t, exponent of J in eps
  double c4_hat = 0.0;  // max J / ((eps^2/t)^{1+1/c} t^{-N/2})
};

/// Checks J <= c0 eps^{2+2/c} sum_n e^{-lambda_n t}(lambda_n + a)^{1+1/c} with c = op.hardy_c
/// (c = 2 alpha in divergence form) and fits the eps-exponent of J at each t.
inline Ker2Result verify_ker2(const EllipticOperator& op, const EigenSystem& eig, const DistanceField& dist,
                              std::vector<double> eps_list, std::vector<double> t_list, double c_tol = 2.0,
                              double fit_floor = 0.0) {
  const double c = op.hardy_c, a = op.hardy_a;
  const int n_dim = op.domain->dim;
  const DistanceField d = scaled_distance(op, dist);
  std::sort(eps_list.begin(), eps_list.end());
  std::sort(t_list.begin(), t_list.end());
  Ker2Result out;
  for (double t : t_list) {
    detail::require(t > 0.0 && t <= 1.0, "verify_ker2: t must lie in (0, 1]");
    double sum = 0.0;
    for (std::size_t n = 0; n < eig.count(); ++n)
      sum += std::exp(-eig.lambda(n) * t) * std::pow(eig.lambda(n) + a, 1.0 + 1.0 / c);
    std::vector<std::pair<double, double>> pts;
    for (double eps : eps_list) {
      const HeatMass m = heat_strip_mass(eig, d, eps, t);
      HeatReport r;
      r.t = t;
      r.eps = eps;
      r.j = m.j;
      r.trace = m.trace;
      r.truncation = m.truncation;
      r.bound = constant_c0(c) * std::pow(eps, 2.0 + 2.0 / c) * sum;
      r.ratio = r.j / r.bound;
      r.tol = strip_tolerance(op, eps, c_tol);
      r.pass = r.ratio <= 1.0 + r.tol;
      out.reports.push_back(r);
      if (m.j > 0.0 && eps >= fit_floor) pts.emplace_back(eps, m.j);
      const double scale = std::pow(eps * eps / t, 1.0 + 1.0 / c) * std::pow(t, -0.5 * n_dim);
      out.c4_hat = std::max(out.c4_hat, m.j / scale);
    }
    if (pts.size() >= 4) out.eps_fits.emplace_back(t, fit_exponent(pts));
  }
  return out;
}

/// Constant of the single-source bound: c0 * (4 pi)^{-N/2} * sup x e^{-x t/2} * sup x^{1/c} e^{-x t/2},
/// with the two sups written as t-free factors.
inline double ker1_constant(double c, int n_dim) {
  const double beta = 1.0 / c;
  return constant_c0(c) * std::pow(4.0 * std::numbers::pi, -0.5 * n_dim) * (2.0 / std::numbers::e) *
         std::pow(2.0 * beta / std::numbers::e, beta);
}

/// Lattice excess of the discrete heat kernel diagonal over (4 pi t)^{-N/2}.
inline double lattice_margin(double h, double t, int n_dim) { return std::pow(1.0 + h * h / (8.0 * t), n_dim); }

/// sum over {d~ < eps} of K(t,x,y)^2 <= c3 e^{at} (eps^2/t)^{1+1/c} t^{-N/2}, for each node y given.
inline std::vector<BoundReport> verify_ker1(const EllipticOperator& op, const EigenSystem& eig,
                                            const DistanceField& dist, double eps, double t,
                                            const std::vector<std::size_t>& y_nodes, double c_tol = 2.0) {
  detail::require(eig.complete(), "verify_ker1 needs a full decomposition");
  detail::require(t > 0.0 && eps > 0.0, "verify_ker1: t and eps must be positive");
  const double c = op.hardy_c, a = op.hardy_a;
  const int n_dim = op.domain->dim;
  const double h = op.domain->h;
  detail::require(t >= 20.0 * h * h, "verify_ker1: t below 20 h^2 is lattice dominated");
  const DistanceField d = scaled_distance(op, dist);
  const auto strip = strip_indices(d, eps);
  const Eigen::VectorXd w = (-t * eig.eigenvalues).array().exp().matrix();
  const double rhs = ker1_constant(c, n_dim) * lattice_margin(h, t, n_dim) * std::exp(a * t) *
                     std::pow(eps * eps / t, 1.0 + 1.0 / c) * std::pow(t, -0.5 * n_dim);
  std::vector<BoundReport> out;
  for (auto y : y_nodes) {
    detail::require(y < op.size(), "verify_ker1: y out of range");
    const Eigen::VectorXd coeff = w.cwiseProduct(eig.eigenvectors.row(static_cast<Eigen::Index>(y)).transpose());
    const Eigen::VectorXd k = eig.eigenvectors * coeff;
    double lhs = 0.0;
    for (auto x : strip) lhs += k[static_cast<Eigen::Index>(x)] * k[static_cast<Eigen::Index>(x)] * eig.measure[static_cast<Eigen::Index>(x)];
    out.push_back(make_report("ker1", lhs, rhs, strip_tolerance(op, eps, c_tol),
                              {{"eps", eps}, {"t", t}, {"c", c}, {"a", a}, {"y", static_cast<double>(y)}}));
  }
  return out;
}

/// max_y K(t,y,y) against (4 pi t)^{-N/2}, allowing the lattice excess.
inline BoundReport verify_ultracontractive(const EigenSystem& eig, double t, int n_dim, double h) {
  detail::require(eig.complete(), "verify_ultracontractive needs a full decomposition");
  detail::require(t >= 20.0 * h * h, "verify_ultracontractive: t below 20 h^2 is lattice dominated");
  const HeatDiagonal k = heat_diag(eig, t);
  const double rhs = std::pow(4.0 * std::numbers::pi * t, -0.5 * n_dim) * lattice_margin(h, t, n_dim);
  return make_report("ultracontractive", k.values.maxCoeff(), rhs, 0.0, {{"t", t}});
}

struct HalflineReference {
  double exact = 0.0;
  double asymptotic = 0.0;
};

/// Integral over (0, eps) of the half-line Dirichlet heat kernel diagonal, and its
/// small-eps leading term (36 pi)^{-1/2} eps^3 t^{-3/2}.
inline HalflineReference halfline_reference(double eps, double t) {
  detail::require(eps > 0.0 && t > 0.0, "halfline_reference: eps and t must be positive");
  const double pre = 1.0 / std::sqrt(4.0 * std::numbers::pi * t);
  // x = eps u, integrand normalized by s = eps^2/t so that it is O(u^2) on [0, 1].
  const double s = eps * eps / t;
  auto integrand = [s](double u) { return -std::expm1(-s * u * u) / s; };
  double err = 0.0;
  const double unit =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, 1.0, 20, 1e-13, &err);
  detail::require(err <= 1e-9 * std::abs(unit), "halfline_reference: quadrature did not reach tolerance",
                  ErrorKind::numerical);
  return {pre * eps * s * unit, std::pow(36.0 * std::numbers::pi, -0.5) * eps * eps * eps * std::pow(t, -1.5)};
}

struct WeylBracket {
  double a1 = 0.0;
  double a2 = 0.0;
  std::size_t admitted = 0;
};

/// a1 = min lambda_n / n^{2/N}, a2 = max over the lowest `admit_fraction` of the discrete spectrum.
inline WeylBracket weyl_bracket(const EigenSystem& eig, int n_dim, double admit_fraction = 2.0 / 3.0) {
  detail::require(n_dim == 1 || n_dim == 2, "weyl_bracket: N must be 1 or 2");
  detail::require(admit_fraction > 0.0 && admit_fraction <= 1.0, "weyl_bracket: admit fraction must lie in (0,1]");
  detail::require(eig.count() >= 10, "weyl_bracket: need at least 10 eigenvalues");
  const auto cap = static_cast<std::size_t>(std::floor(admit_fraction * static_cast<double>(eig.dimension)));
  WeylBracket w;
  w.admitted = std::min(eig.count(), cap);
  detail::require(w.admitted >= 1, "weyl_bracket: admitted range is empty");
  w.a1 = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < w.admitted; ++n) {
    const double v = eig.lambda(n) / std::pow(static_cast<double>(n + 1), 2.0 / n_dim);
    w.a1 = std::min(w.a1, v);
    w.a2 = std::max(w.a2, v);
  }
  return w;
}

/// N(eps, lambda) <= c0 eps^{2+2/c} (lambda + a)^{1+1/c} N(lambda).
inline BoundReport verify_thm16(const EllipticOperator& op, const EigenSystem& eig, const DistanceField& dist,
                                double eps, double lambda, double c_tol = 2.0) {
  detail::require(eig.complete() || lambda < eig.eigenvalues[eig.eigenvalues.size() - 1],
                  "verify_thm16: lambda above the computed part of the spectrum");
  const double c = op.hardy_c, a = op.hardy_a;
  const DistanceField d = scaled_distance(op, dist);
  const std::size_t count = counting(eig, lambda);
  const double lhs = strip_counting(eig, strip_indices(d, eps), lambda);
  const double rhs = constant_c0(c) * std::pow(eps, 2.0 + 2.0 / c) * std::pow(lambda + a, 1.0 + 1.0 / c) *
                     static_cast<double>(count);
  return make_report("thm16", lhs, rhs, strip_tolerance(op, eps, c_tol),
                     {{"eps", eps}, {"lambda", lambda}, {"N", static_cast<double>(count)}, {"c", c}, {"a", a}});
}

/// ||Q_eps E_lambda||^2 as the top eigenvalue of the strip Gram matrix of {phi_n : lambda_n < lambda}.
inline BoundReport verify_projection_norm(const EllipticOperator& op, const EigenSystem& eig,
                                          const DistanceField& dist, double eps, double lambda, double c_tol = 2.0) {
  detail::require(eig.complete() || lambda < eig.eigenvalues[eig.eigenvalues.size() - 1],
                  "verify_projection_norm: lambda above the computed part of the spectrum");
  const double c = op.hardy_c, a = op.hardy_a;
  const DistanceField d = scaled_distance(op, dist);
  const auto count = static_cast<Eigen::Index>(counting(eig, lambda));
  const auto strip = strip_indices(d, eps);
  double top = 0.0;
  if (count > 0 && !strip.empty()) {
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(strip.size()), count);
    for (std::size_t k = 0; k < strip.size(); ++k) {
      const auto x = static_cast<Eigen::Index>(strip[k]);
      rows.row(static_cast<Eigen::Index>(k)) = std::sqrt(eig.measure[x]) * eig.eigenvectors.row(x).head(count);
    }
    const Eigen::MatrixXd gram = rows.transpose() * rows;
    top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  }
  const double rhs = count > 0 ? constant_c0(c) * std::pow(eps, 2.0 + 2.0 / c) * std::pow(lambda + a, 1.0 + 1.0 / c)
                               : 0.0;
  return make_report("thm16_projection", top, rhs, strip_tolerance(op, eps, c_tol),
                     {{"eps", eps}, {"lambda", lambda}, {"N", static_cast<double>(count)}, {"c", c}, {"a", a}});
}

}  // namespace decaylab
