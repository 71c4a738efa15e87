#pragma once

// Eigenvalue shifts under inward shrinking U -> U_eps = {d > eps}, and the cutoff
// lemmas that control them.

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "decaylab/estimates.hpp"

namespace decaylab {

struct ShrinkTable {
  std::string domain;
  std::string op;
  std::vector<double> eps;                  // eps[0] = 0 is the baseline, then ascending
  std::vector<std::vector<double>> lambda;  // lambda[k][n] on U_{eps[k]}
  std::size_t n_max = 0;
  double hardy_c = 2.0;

  double gap(std::size_t k, std::size_t n) const { return lambda[k][n] - lambda[0][n]; }
};

/// Lowest n_max eigenvalues of the operator reassembled on every U_eps (eps in d~ units).
inline ShrinkTable shrink_and_solve(const EllipticOperator& op, const DistanceField& dist, std::vector<double> eps_list,
                                    std::size_t n_max, const SolverOptions& opts = {}) {
  detail::require(n_max >= 1, "shrink_and_solve: n_max must be at least 1");
  std::sort(eps_list.begin(), eps_list.end());
  eps_list.erase(std::unique(eps_list.begin(), eps_list.end()), eps_list.end());
  if (eps_list.empty() || eps_list.front() != 0.0) eps_list.insert(eps_list.begin(), 0.0);
  for (double e : eps_list) detail::require(e >= 0.0, "shrink_and_solve: eps must be nonnegative");

  ShrinkTable t;
  t.domain = op.domain->name;
  t.op = op.describe();
  t.n_max = n_max;
  t.hardy_c = op.hardy_c;
  const DistanceField raw = dist;
  for (double e : eps_list) {
    // U_eps is stated for d~; convert back to the raw distance for the mask.
    auto sub = std::make_shared<const GridDomain>(inner_region(*op.domain, raw, e / op.distance_scale));
    detail::require(sub->size() >= n_max,
                    "shrink_and_solve: U_eps for eps=" + detail::fmt_num(e) + " has only " +
                        std::to_string(sub->size()) + " interior nodes",
                    ErrorKind::domain);
    const EllipticOperator sop = e == 0.0 ? op : reassemble(op, sub);
    const EigenSystem eig = eigensolve(sop, n_max, opts);
    t.eps.push_back(e);
    t.lambda.emplace_back(eig.eigenvalues.data(), eig.eigenvalues.data() + eig.eigenvalues.size());
  }
  return t;
}

struct RateResult {
  std::size_t n = 0;  // 1-based mode index
  ExponentFit fit;
  double c_hat = 0.0;  // max gap / eps^{2/c}
  BoundReport report;  // (2/c - 0.1) against the fitted exponent
};

/// Fits gap_n(eps) over the `window_points` smallest positive eps values.
inline std::vector<RateResult> verify_thm11(const ShrinkTable& table, double c, std::size_t n_max,
                                            std::size_t window_points = 4, double slack = 0.1) {
  detail::require(n_max <= table.n_max, "verify_thm11: n_max exceeds the table");
  detail::require(table.eps.size() >= window_points + 1, "verify_thm11: not enough eps values for the fit window");
  detail::require(window_points >= 4, "verify_thm11: need at least 4 points in the fit window");
  const double rate = 2.0 / c;
  std::vector<RateResult> out;
  for (std::size_t n = 0; n < n_max; ++n) {
    const double scale = std::max(1.0, std::abs(table.lambda[0][n]));
    std::vector<std::pair<double, double>> pts;
    double prev = 0.0;
    RateResult r;
    r.n = n + 1;
    for (std::size_t k = 1; k < table.eps.size(); ++k) {
      const double g = table.gap(k, n);
      detail::require(g >= -1e-9 * scale, "verify_thm11: lambda_n(U_eps) < lambda_n(U) (monotonicity violated)",
                      ErrorKind::numerical);
      detail::require(g >= prev - 1e-9 * scale, "verify_thm11: gaps not monotone in eps (discretization failure)",
                      ErrorKind::numerical);
      prev = g;
      if (k <= window_points) pts.emplace_back(table.eps[k], g);
      r.c_hat = std::max(r.c_hat, g / std::pow(table.eps[k], rate));
    }
    r.fit = fit_exponent(pts);
    r.report = make_report("thm11_rate", rate - slack, r.fit.exponent, 0.0,
                           {{"n", static_cast<double>(n + 1)}, {"c", c}, {"c_hat", r.c_hat}},
                           "gap_" + std::to_string(n + 1));
    out.push_back(r);
  }
  return out;
}

struct CutoffReports {
  BoundReport q_bound;     // Q(mu f) - Q(f) against eps^{2/c} c2 F
  BoundReport norm_bound;  // ||f|| - ||mu f|| against c3 eps^{1+1/c} F^{1/2}
};

inline CutoffReports verify_lemma9_10(const EllipticOperator& op, const EigenSystem& eig, const DistanceField& dist,
                                      const Eigen::VectorXd& f, double eps, double c_tol = 2.0,
                                      const std::string& subject = {}) {
  detail::require(f.size() > 0 && f.cwiseAbs().maxCoeff() > 0.0, "verify_lemma9_10: f must be nonzero");
  detail::require(eps > 0.0, "verify_lemma9_10: eps must be positive");
  const double c = op.hardy_c;
  const DistanceField d = scaled_distance(op, dist);
  const Eigen::VectorXd mu = cutoff_mu(d, eps);
  const Eigen::VectorXd muf = mu.cwiseProduct(f);
  const double fac = operator_factor(eig, span_coefficients(eig, f), c, op.hardy_a).product();
  const double tol = strip_tolerance(op, eps, c_tol);
  auto params = std::vector<std::pair<std::string, double>>{
      {"eps", eps}, {"c", c}, {"a", op.hardy_a}, {"c2", constant_c2(c)}, {"c3", constant_c3(c)}};
  CutoffReports r;
  r.q_bound = make_report("lemma9", quadratic_form(op, muf) - quadratic_form(op, f),
                          std::pow(eps, 2.0 / c) * constant_c2(c) * fac, tol, params, subject);
  r.norm_bound = make_report("lemma10", weighted_norm(op, f) - weighted_norm(op, muf),
                             constant_c3(c) * std::pow(eps, 1.0 + 1.0 / c) * std::sqrt(fac), tol, params, subject);
  if (d.max() < 2.0 * eps) r.q_bound.vacuous = r.norm_bound.vacuous = true;
  return r;
}

}  // namespace decaylab
