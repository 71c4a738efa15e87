#pragma once

// Boundary-strip inequalities: the weights omega, tau, mu, the Hardy check, strip bounds
// on |f|^2 and |grad f|^2, their eigenfunction forms, and power-law fits over eps.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "decaylab/spectral.hpp"

namespace decaylab {

struct BoundReport {
  std::string name;
  std::string subject;  // f descriptor
  std::vector<std::pair<std::string, double>> params;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double tol = 0.0;
  bool pass = true;
  bool vacuous = false;  // both sides zero or outside the range of the statement

  double param(const std::string& key, double fallback = std::numeric_limits<double>::quiet_NaN()) const {
    for (const auto& [k, v] : params)
      if (k == key) return v;
    return fallback;
  }
};

/// Builds a report; lhs may carry round-off below zero, which is clamped.
inline BoundReport make_report(std::string name, double lhs, double rhs, double tol,
                               std::vector<std::pair<std::string, double>> params = {}, std::string subject = {}) {
  BoundReport r;
  r.name = std::move(name);
  r.subject = std::move(subject);
  r.params = std::move(params);
  detail::require(std::isfinite(lhs) && std::isfinite(rhs), r.name + ": non-finite bound value", ErrorKind::numerical);
  r.lhs = std::max(lhs, 0.0);
  r.rhs = rhs;
  r.tol = tol;
  if (r.rhs == 0.0 && r.lhs == 0.0) {
    r.vacuous = true;
    r.ratio = 0.0;
  } else {
    detail::require(r.rhs > 0.0, r.name + ": right-hand side must be positive", ErrorKind::numerical);
    r.ratio = r.lhs / r.rhs;
  }
  r.pass = r.ratio <= 1.0 + tol;
  return r;
}

struct ExponentFit {
  double exponent = 0.0;
  double log_constant = 0.0;
  double r_squared = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  std::size_t points = 0;
};

/// Least-squares slope of log(value) against log(eps) over eps in [lo, hi].
inline ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points, double lo = 0.0,
                                double hi = std::numeric_limits<double>::infinity()) {
  std::vector<std::pair<double, double>> use;
  for (auto [e, v] : points) {
    detail::require(e > 0.0, "fit_exponent: eps must be positive");
    if (e < lo * (1.0 - 1e-12) || e > hi * (1.0 + 1e-12)) continue;
    detail::require(v > 0.0, "fit_exponent: values must be positive");
    use.emplace_back(std::log(e), std::log(v));
  }
  detail::require(use.size() >= 4, "fit_exponent: need at least 4 points in the window, have " +
                                       std::to_string(use.size()));
  const double n = static_cast<double>(use.size());
  double mx = 0, my = 0;
  for (auto [x, y] : use) mx += x, my += y;
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : use) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  detail::require(sxx > 0.0, "fit_exponent: eps values must not all coincide");
  ExponentFit fit;
  fit.exponent = sxy / sxx;
  fit.log_constant = my - fit.exponent * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  double wlo = std::numeric_limits<double>::infinity(), whi = 0.0;
  for (auto [x, y] : use) wlo = std::min(wlo, std::exp(x)), whi = std::max(whi, std::exp(x));
  fit.window = {wlo, whi};
  fit.points = use.size();
  return fit;
}

// ---------------------------------------------------------------------------------------
// Constants

inline double constant_c0(double c) { return std::pow(c, 2.0 + 2.0 / c); }

inline double constant_c1(double c) { return std::pow(c, 2.0 / c) * (1.0 + std::pow(1.0 + c, 2.0 + 2.0 / c)); }

/// Cutoff energy constant: shell {eps < d < 2 eps} bounded by the strip estimates at 2 eps.
inline double constant_c2(double c) {
  return std::pow(2.0, 1.0 + 2.0 / c) * constant_c1(c) + std::pow(2.0, 3.0 + 2.0 / c) * constant_c0(c);
}

inline double constant_c3(double c) { return std::sqrt(constant_c0(c) * std::pow(2.0, 2.0 + 2.0 / c)); }

// ---------------------------------------------------------------------------------------
// Schedules

enum class EpsSnap { none, node, cell_center };

struct EpsSchedule {
  double ratio = 0.5;
  double floor_cells = 10.0;  // smallest eps in units of h
  double start = 0.0;         // 0 = min(0.2 max d, inradius / 2)
  EpsSnap snap = EpsSnap::cell_center;
};

/// Geometric eps sweep, descending, in the same units as `dist`.
inline std::vector<double> eps_schedule(const DistanceField& dist, double h, const EpsSchedule& s = {}) {
  detail::require(s.ratio > 0.0 && s.ratio < 1.0, "eps schedule: ratio must lie in (0,1)");
  detail::require(h > 0.0, "eps schedule: h must be positive");
  const double top = s.start > 0.0 ? s.start : std::min(0.2 * dist.max(), 0.5 * dist.max());
  const double bottom = s.floor_cells * h;
  std::vector<double> out;
  for (double e = top; e >= bottom * (1.0 - 1e-9); e *= s.ratio) {
    double v = e;
    if (s.snap == EpsSnap::node) v = std::max(1.0, std::round(e / h)) * h;
    if (s.snap == EpsSnap::cell_center) v = (std::max(0.0, std::floor(e / h - 0.5)) + 0.5) * h;
    if (v < bottom * (1.0 - 1e-9)) break;
    if (out.empty() || v < out.back() * (1.0 - 1e-9)) out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------------------
// Weights

inline Eigen::VectorXd weight_omega(const DistanceField& dist, double eps, double c) {
  detail::require(eps > 0.0 && c >= 2.0, "weight_omega: need eps > 0 and c >= 2");
  return dist.values.unaryExpr([eps, c](double d) { return std::pow(std::max(d, eps), -1.0 / c); });
}

inline double tau_value(double d, double eps, double c) {
  if (d <= eps) return std::pow(eps, -1.0 / c);
  if (d <= (1.0 + c) * eps) return std::pow(eps, -1.0 - 1.0 / c) * ((1.0 + c) * eps - d) / c;
  return 0.0;
}

inline Eigen::VectorXd weight_tau(const DistanceField& dist, double eps, double c) {
  detail::require(eps > 0.0 && c >= 2.0, "weight_tau: need eps > 0 and c >= 2");
  return dist.values.unaryExpr([eps, c](double d) { return tau_value(d, eps, c); });
}

inline double mu_value(double d, double eps) {
  if (d <= eps) return 0.0;
  if (d <= 2.0 * eps) return (d - eps) / eps;
  return 1.0;
}

inline Eigen::VectorXd cutoff_mu(const DistanceField& dist, double eps) {
  detail::require(eps > 0.0, "cutoff_mu: eps must be positive");
  return dist.values.unaryExpr([eps](double d) { return mu_value(d, eps); });
}

/// d~ = distance_scale * d, the distance the operator's Hardy inequality is stated for.
inline DistanceField scaled_distance(const EllipticOperator& op, const DistanceField& dist) {
  detail::require(static_cast<std::size_t>(dist.values.size()) == op.size(), "distance field size mismatch");
  if (op.distance_scale == 1.0) return dist;
  return {op.distance_scale * dist.values, dist.source + " (scaled by " + detail::fmt_num(op.distance_scale) + ")"};
}

/// Nodal |grad w|^2 in the operator's own metric for w = profile(d~), with d~ = 0 on
/// Dirichlet nodes; normalised by sigma^2 at the node so that sum G |f|^2 sigma^2 h^dim
/// dominates the face-sum gradient term of the form.
inline Eigen::VectorXd weight_gradient_squared(const EllipticOperator& op, const DistanceField& scaled,
                                               const std::function<double(double)>& profile) {
  const GridDomain& g = *op.domain;
  Eigen::VectorXd lattice = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(g.lattice_size()), profile(0.0));
  for (std::size_t n = 0; n < g.size(); ++n)
    lattice[static_cast<Eigen::Index>(g.interior[n])] = profile(scaled.values[static_cast<Eigen::Index>(n)]);
  Eigen::VectorXd grad = nodal_gradient_squared(op, lattice, false);
  return grad.cwiseQuotient(op.measure / g.measure_per_node());
}

// ---------------------------------------------------------------------------------------
// Operator factors

/// ||(H+a) f|| ||(H+a)^{1/c} f|| from spectral coefficients.
struct OperatorFactor {
  double norm_h = 0.0;     // ||(H+a) f||
  double norm_frac = 0.0;  // ||(H+a)^{1/c} f||
  double product() const { return norm_h * norm_frac; }
};

inline OperatorFactor operator_factor(const EigenSystem& eig, const Eigen::VectorXd& coeffs, double c, double a) {
  return {spectral_power_norm(eig, coeffs, 1.0, a), spectral_power_norm(eig, coeffs, 1.0 / c, a)};
}

inline double strip_tolerance(const EllipticOperator& op, double eps, double c_tol) {
  return c_tol * op.domain->h * op.distance_scale / eps;
}

namespace detail {

inline void require_nonzero(const Eigen::VectorXd& f, const std::string& who) {
  require(f.size() > 0 && f.cwiseAbs().maxCoeff() > 0.0, who + ": f must be nonzero");
}

inline std::vector<std::pair<std::string, double>> base_params(const EllipticOperator& op, double eps) {
  return {{"eps", eps}, {"c", op.hardy_c}, {"a", op.hardy_a}};
}

}  // namespace detail

/// Strip integrals of |f|^2 sigma^2 / d^2 and |f|^2 sigma^2 over {d < eps} (no bound attached).
inline std::pair<double, double> strip_integrals(const EllipticOperator& op, const DistanceField& dist,
                                                 const Eigen::VectorXd& f, double eps) {
  const DistanceField d = scaled_distance(op, dist);
  double d2 = 0.0, mass = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (d.values[i] >= eps) continue;
    const double w = f[i] * f[i] * op.measure[i];
    mass += w;
    d2 += w / (d.values[i] * d.values[i]);
  }
  return {d2, mass};
}

// ---------------------------------------------------------------------------------------
// Checks

/// sum |f|^2 d~^-2 sigma^2 h^dim <= c^2 (Q(f) + a ||f||^2).
inline BoundReport verify_hi(const EllipticOperator& op, const DistanceField& dist, const Eigen::VectorXd& f,
                             double c_tol = 2.0, const std::string& subject = {}) {
  detail::require_nonzero(f, "verify_hi");
  const DistanceField d = scaled_distance(op, dist);
  double lhs = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) lhs += f[i] * f[i] * op.measure[i] / (d.values[i] * d.values[i]);
  const double rhs = op.hardy_c * op.hardy_c * (quadratic_form(op, f) + op.hardy_a * weighted_inner(op, f, f));
  const double tol = c_tol * op.domain->h * op.distance_scale / d.max();
  return make_report("hi", lhs, rhs, tol, {{"c", op.hardy_c}, {"a", op.hardy_a}}, subject);
}

struct StripReports {
  BoundReport strip_d2;
  BoundReport strip_mass;
};

/// Strip bounds on |f|^2/d~^2 and |f|^2 over {d~ < eps}; c = op.hardy_c, a = op.hardy_a.
inline StripReports verify_thm4(const EllipticOperator& op, const EigenSystem& eig, const DistanceField& dist,
                                const Eigen::VectorXd& f,
                                double eps, double c_tol = 2.0, const std::string& subject = {}) {
  detail::require_nonzero(f, "verify_thm4");
  detail::require(eps > 0.0, "verify_thm4: eps must be positive");
  const double c = op.hardy_c;
  const auto [d2, mass] = strip_integrals(op, dist, f, eps);
  const auto fac = operator_factor(eig, span_coefficients(eig, f), c, op.hardy_a).product();
  const double c0 = constant_c0(c);
  const double tol = strip_tolerance(op, eps, c_tol);
  auto params = detail::base_params(op, eps);
  params.emplace_back("c0", c0);
  return {make_report("thm4_strip_d2", d2, c0 * std::pow(eps, 2.0 / c) * fac, tol, params, subject),
          make_report("thm4_strip_mass", mass, c0 * std::pow(eps, 2.0 + 2.0 / c) * fac, tol, params, subject)};
}

/// Sum over faces with both ends in {d~ < eps} (Dirichlet nodes count, d = 0 there)
/// of grad_weight |df/h|^2 h^dim.
inline double strip_gradient_energy(const EllipticOperator& op, const DistanceField& scaled, const Eigen::VectorXd& f,
                                    double eps) {
  const double h = op.domain->h;
  const double cell = op.domain->measure_per_node();
  double total = 0.0;
  for (const auto& face : op.faces) {
    if (scaled.values[face.lo] >= eps) continue;
    if (face.hi >= 0 && scaled.values[face.hi] >= eps) continue;
    const auto [a, b] = face_values(face, f);
    total += face.grad_weight * (b - a) * (b - a) / (h * h) * cell;
  }
  return total;
}

inline BoundReport verify_thm6(const EllipticOperator& op, const EigenSystem& eig, const DistanceField& dist,
                                const Eigen::VectorXd& f,
                               double eps, double c_tol = 2.0, const std::string& subject = {}) {
  detail::require_nonzero(f, "verify_thm6");
  detail::require(eps > 0.0, "verify_thm6: eps must be positive");
  const double c = op.hardy_c;
  const DistanceField d = scaled_distance(op, dist);
  const double lhs = strip_gradient_energy(op, d, f, eps);
  const auto fac = operator_factor(eig, span_coefficients(eig, f), c, op.hardy_a).product();
  const double c1 = constant_c1(c);
  auto params = detail::base_params(op, eps);
  params.emplace_back("c1", c1);
  return make_report("thm6_strip_grad", lhs, c1 * std::pow(eps, 2.0 / c) * fac, strip_tolerance(op, eps, c_tol),
                     params, subject);
}

inline constexpr double kGammaMin = 1e-3;

/// sum g(d~)|f|^2 sigma^2 h^dim with g(s) = s^-gamma - delta^-gamma on (0, delta], 0 beyond.
inline BoundReport verify_cor5(const EllipticOperator& op, const EigenSystem& eig, const DistanceField& dist,
                                const Eigen::VectorXd& f,
                               double gamma, double delta, double c_tol = 2.0, const std::string& subject = {}) {
  detail::require_nonzero(f, "verify_cor5");
  const double c = op.hardy_c;
  const double p = 2.0 + 2.0 / c;
  detail::require(delta > 0.0, "verify_cor5: delta must be positive");
  detail::require(gamma >= kGammaMin, "verify_cor5: gamma below " + detail::fmt_num(kGammaMin) + " degenerates");
  detail::require(gamma < p, "verify_cor5: gamma >= 2 + 2/c makes the right-hand side diverge");
  const DistanceField d = scaled_distance(op, dist);
  detail::require(delta <= d.max() * (1.0 + 1e-12), "verify_cor5: delta exceeds max d");
  double lhs = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double s = d.values[i];
    if (s >= delta) continue;
    lhs += (std::pow(s, -gamma) - std::pow(delta, -gamma)) * f[i] * f[i] * op.measure[i];
  }
  const double integral = gamma * std::pow(delta, p - gamma) / (p - gamma);
  const auto fac = operator_factor(eig, span_coefficients(eig, f), c, op.hardy_a).product();
  return make_report("cor5", lhs, constant_c0(c) * integral * fac, strip_tolerance(op, delta, c_tol),
                     {{"gamma", gamma}, {"delta", delta}, {"c", c}, {"a", op.hardy_a}, {"s_integral", integral}},
                     subject);
}

struct EigenfunctionReports {
  BoundReport mass;           // c0 eps^{2+2/c} (lambda+a)^{1+1/c}
  BoundReport grad;           // c1 eps^{2/c} (lambda+a)^{1+1/c}
  BoundReport interpolation;  // c^2 eps^2 (lambda+a)
  BoundReport trivial;        // <= 1
};

inline EigenfunctionReports verify_eigenfunction(const EllipticOperator& op, const EigenSystem& eig,
                                                 const DistanceField& dist, std::size_t n, double eps,
                                                 double c_tol = 2.0) {
  detail::require(n < eig.count(), "verify_eigenfunction: n out of range");
  detail::require(eps > 0.0, "verify_eigenfunction: eps must be positive");
  const double c = op.hardy_c, a = op.hardy_a;
  const DistanceField d = scaled_distance(op, dist);
  const Eigen::VectorXd f = eig.phi(n);
  double mass = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    if (d.values[i] < eps) mass += f[i] * f[i] * op.measure[i];
  const double grad = strip_gradient_energy(op, d, f, eps);
  const double la = eig.lambda(n) + a;
  const double fac = std::pow(la, 1.0 + 1.0 / c);
  const double tol = strip_tolerance(op, eps, c_tol);
  auto params = detail::base_params(op, eps);
  params.emplace_back("n", static_cast<double>(n + 1));
  params.emplace_back("lambda", eig.lambda(n));
  const std::string subject = "phi_" + std::to_string(n + 1);
  return {make_report("cor7_mass", mass, constant_c0(c) * std::pow(eps, 2.0 + 2.0 / c) * fac, tol, params, subject),
          make_report("cor7_grad", grad, constant_c1(c) * std::pow(eps, 2.0 / c) * fac, tol, params, subject),
          make_report("cor7_interpolation", mass, c * c * eps * eps * la, tol, params, subject),
          make_report("cor7_trivial", mass, 1.0, 1e-10, params, subject)};
}

/// |<Hf, w^2 f> + s||w f||^2| <= c^{2/c} ||(H+s)f|| ||(H+a)^{1/c} f||.
inline BoundReport verify_lemma1(const EllipticOperator& op, const EigenSystem& eig, const DistanceField& dist,
                                 const Eigen::VectorXd& f, double eps, double s, const std::string& subject = {}) {
  detail::require_nonzero(f, "verify_lemma1");
  detail::require(s >= 0.0, "verify_lemma1: s must be nonnegative");
  const double c = op.hardy_c;
  const Eigen::VectorXd w = weight_omega(scaled_distance(op, dist), eps, c);
  const Eigen::VectorXd w2f = w.cwiseProduct(w).cwiseProduct(f);
  const double lhs = std::abs(w2f.dot(op.stiffness * f) + s * weighted_inner(op, w2f, f));
  const Eigen::VectorXd hs = op.apply(f) + s * f;
  const double frac = spectral_power_norm(eig, span_coefficients(eig, f), 1.0 / c, op.hardy_a);
  auto params = detail::base_params(op, eps);
  params.emplace_back("s", s);
  return make_report("lemma1", lhs, std::pow(c, 2.0 / c) * weighted_norm(op, hs) * frac, 1e-10, params, subject);
}

/// Q(mu f) <= 2||mu||^2 Q(f) + 2||grad mu||^2 ||f||^2 for a nodal weight mu = profile(d~).
inline BoundReport verify_lemma2(const EllipticOperator& op, const DistanceField& dist,
                                 const std::function<double(double)>& profile, const Eigen::VectorXd& f,
                                 const std::string& weight_name) {
  detail::require_nonzero(f, "verify_lemma2");
  const DistanceField d = scaled_distance(op, dist);
  const Eigen::VectorXd mu = d.values.unaryExpr(profile);
  const double mu_inf = mu.cwiseAbs().maxCoeff();
  const double grad_inf = weight_gradient_squared(op, d, profile).maxCoeff();
  const double lhs = quadratic_form(op, mu.cwiseProduct(f));
  const double rhs = 2.0 * mu_inf * mu_inf * quadratic_form(op, f) + 2.0 * grad_inf * weighted_inner(op, f, f);
  return make_report("lemma2", lhs, rhs, 1e-10, {{"c", op.hardy_c}}, weight_name);
}

/// sum w^2|f|^2 sigma^2/(c^2 d~^2) <= c^{2/c}||(H+a)f|| ||(H+a)^{1/c}f|| + sum |grad w|^2 |f|^2 sigma^2.
inline BoundReport verify_lemma3(const EllipticOperator& op, const EigenSystem& eig, const DistanceField& dist,
                                 const Eigen::VectorXd& f, double eps, const std::string& subject = {}) {
  detail::require_nonzero(f, "verify_lemma3");
  const double c = op.hardy_c;
  const DistanceField d = scaled_distance(op, dist);
  const Eigen::VectorXd w = weight_omega(d, eps, c);
  double lhs = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    lhs += w[i] * w[i] * f[i] * f[i] * op.measure[i] / (c * c * d.values[i] * d.values[i]);
  const auto profile = [eps, c](double s) { return std::pow(std::max(s, eps), -1.0 / c); };
  const Eigen::VectorXd g2 = weight_gradient_squared(op, d, profile);
  const double grad_term = g2.cwiseProduct(f).cwiseProduct(f).dot(op.measure);
  const auto fac = operator_factor(eig, span_coefficients(eig, f), c, op.hardy_a).product();
  return make_report("lemma3", lhs, std::pow(c, 2.0 / c) * fac + grad_term, 1e-10, detail::base_params(op, eps),
                     subject);
}

// ---------------------------------------------------------------------------------------
// Test vectors

/// Seeded vectors in the operator domain: f = (H+a)^-1 g with g uniform in [-1,1] per node.
/// For partial eigensystems g is replaced by its projection onto the computed span.
inline std::vector<Eigen::VectorXd> random_domain_vectors(const EllipticOperator& op, const EigenSystem& eig,
                                                          std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXd> out;
  const auto n = static_cast<Eigen::Index>(op.size());
  for (std::size_t k = 0; k < count; ++k) {
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) g[i] = 2.0 * detail::unit_uniform(rng) - 1.0;
    Eigen::VectorXd c = eig.coefficients(g);
    for (Eigen::Index j = 0; j < c.size(); ++j) c[j] /= spectral_power(eig.eigenvalues[j] + op.hardy_a, 1.0);
    out.push_back(eig.eigenvectors * c);
  }
  return out;
}

/// Model profile x^{1-alpha} chi(x): chi is a smooth step from 1 (x <= 1) to 0 (x >= 2).
inline double example5_profile(double x, double alpha_w) {
  if (x <= 0.0 || x >= 2.0) return 0.0;
  const auto s = [](double y) { return y > 0.0 ? std::exp(-1.0 / y) : 0.0; };
  const double chi = x <= 1.0 ? 1.0 : s(2.0 - x) / (s(2.0 - x) + s(x - 1.0));
  return std::pow(x, 1.0 - alpha_w) * chi;
}

inline Eigen::VectorXd example5_function(const EllipticOperator& op) {
  const double alpha_w = op.recipe.weight.alpha_w;
  Eigen::VectorXd f(static_cast<Eigen::Index>(op.size()));
  for (std::size_t i = 0; i < op.size(); ++i)
    f[static_cast<Eigen::Index>(i)] = example5_profile(op.domain->interior_position(i).x, alpha_w);
  return f;
}

}  // namespace decaylab
