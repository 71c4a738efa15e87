#pragma once

// Eigendecomposition of assembled operators and the spectral functionals built on it:
// fractional powers (H+a)^p, the heat-kernel diagonal, eigenvalue counting, and the
// numerically optimal Hardy constant.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "decaylab/operator.hpp"

namespace decaylab {

struct SolverOptions {
  std::size_t dense_cap = 4096;        // largest matrix handed to the dense solver
  std::size_t sparse_threshold = 1600;  // partial solves above this size use subspace iteration
  double tolerance = 1e-9;              // relative residual for iterative solves
  int max_iterations = 3000;
  std::uint64_t seed = 0x5eed;
};

struct EigenSystem {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns sigma^2-orthonormal
  Eigen::VectorXd measure;       // sigma^2 h^dim of the source operator
  std::size_t dimension = 0;     // size of the full problem
  std::string op_id;

  std::size_t count() const { return static_cast<std::size_t>(eigenvalues.size()); }
  bool complete() const { return count() == dimension; }
  double lambda(std::size_t n) const { return eigenvalues[static_cast<Eigen::Index>(n)]; }
  auto phi(std::size_t n) const { return eigenvectors.col(static_cast<Eigen::Index>(n)); }

  /// <f, phi_n>_sigma for every computed n.
  Eigen::VectorXd coefficients(const Eigen::VectorXd& f) const {
    detail::require(static_cast<std::size_t>(f.size()) == dimension, "coefficients: dimension mismatch");
    return eigenvectors.transpose() * f.cwiseProduct(measure);
  }
};

namespace detail {

inline double unit_uniform(std::mt19937_64& rng) {
  // 53 random bits -> [0,1); independent of the standard library's distribution code.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

/// First nonzero component of every column made positive.
inline void fix_signs(Eigen::MatrixXd& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    const double scale = v.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      if (std::abs(v(r, c)) > 1e-8 * scale) {
        if (v(r, c) < 0) v.col(c) *= -1.0;
        break;
      }
    }
  }
}

/// Lowest `m` eigenpairs of a sparse symmetric positive definite matrix by
/// shift-invert subspace iteration with Rayleigh-Ritz.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> lowest_eigenpairs(const Eigen::SparseMatrix<double>& s,
                                                                     std::size_t m, const SolverOptions& opts,
                                                                     double residual_scale = 1.0) {
  const Eigen::Index n = s.rows();
  const auto want = static_cast<Eigen::Index>(m);
  const Eigen::Index p = std::min<Eigen::Index>(n, std::max<Eigen::Index>(2 * want, want + 16));
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(s);
  require(ldlt.info() == Eigen::Success, "sparse factorization failed (matrix not positive definite?)",
          ErrorKind::numerical);

  std::mt19937_64 rng(opts.seed);
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index c = 0; c < p; ++c)
    for (Eigen::Index r = 0; r < n; ++r) x(r, c) = 2.0 * unit_uniform(rng) - 1.0;
  x = orthonormal_columns(x);

  for (int it = 0; it < opts.max_iterations; ++it) {
    Eigen::MatrixXd q = orthonormal_columns(ldlt.solve(x));
    Eigen::MatrixXd sq = s * q;
    Eigen::MatrixXd t = q.transpose() * sq;
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(t);
    x = q * small.eigenvectors();
    Eigen::MatrixXd sx = sq * small.eigenvectors();
    const Eigen::VectorXd theta = small.eigenvalues();
    bool converged = true;
    for (Eigen::Index c = 0; c < want && converged; ++c) {
      const double r = (sx.col(c) - theta[c] * x.col(c)).norm();
      converged = r <= opts.tolerance * residual_scale * std::max(1.0, std::abs(theta[c]));
    }
    if (converged) return {theta.head(want), x.leftCols(want)};
  }
  fail(ErrorKind::numerical, "subspace iteration did not converge");
}

}  // namespace detail

/// Eigenpairs of H, ascending. `m` empty means the full spectrum (dense solve).
inline EigenSystem eigensolve(const EllipticOperator& op, std::optional<std::size_t> m = std::nullopt,
                              const SolverOptions& opts = {}) {
  const std::size_t n = op.size();
  detail::require(n > 0, "eigensolve: empty domain", ErrorKind::domain);
  const std::size_t want = m.value_or(n);
  detail::require(want >= 1 && want <= n,
                  "eigensolve: requested " + std::to_string(want) + " eigenpairs of a " + std::to_string(n) +
                      "-dimensional problem");
  EigenSystem out;
  out.measure = op.measure;
  out.dimension = n;
  out.op_id = op.domain->name + " | " + op.describe();
  const Eigen::VectorXd inv_sqrt_m = op.measure.cwiseSqrt().cwiseInverse();

  const bool dense = want == n || n <= opts.sparse_threshold;
  if (dense) {
    detail::require(n <= opts.dense_cap,
                    "eigensolve: " + std::to_string(n) + " nodes exceed the dense cap " +
                        std::to_string(opts.dense_cap) + "; request a partial spectrum",
                    ErrorKind::numerical);
    Eigen::MatrixXd s = Eigen::MatrixXd(op.symmetrized());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    detail::require(es.info() == Eigen::Success, "dense eigensolver failed", ErrorKind::numerical);
    out.eigenvalues = es.eigenvalues().head(static_cast<Eigen::Index>(want));
    out.eigenvectors = inv_sqrt_m.asDiagonal() * es.eigenvectors().leftCols(static_cast<Eigen::Index>(want));
  } else {
    // Residuals of S translate to sigma-weighted residuals of H divided by sqrt(min measure).
    auto [values, vectors] =
        detail::lowest_eigenpairs(op.symmetrized(), want, opts, std::sqrt(op.measure.minCoeff()));
    out.eigenvalues = values;
    out.eigenvectors = inv_sqrt_m.asDiagonal() * vectors;
  }
  detail::fix_signs(out.eigenvectors);
  detail::require(out.eigenvalues[0] > 0.0, "eigensolve: lowest eigenvalue is not positive", ErrorKind::numerical);
  return out;
}

/// ||H phi_n - lambda_n phi_n||_sigma.
inline double residual_norm(const EllipticOperator& op, const EigenSystem& eig, std::size_t k) {
  Eigen::VectorXd phi = eig.phi(k);
  Eigen::VectorXd r = op.apply(phi) - eig.lambda(k) * phi;
  return weighted_norm(op, r);
}

/// (lambda + a)^p with the admissibility rules of the spectral calculus.
inline double spectral_power(double lambda_plus_a, double p) {
  if (p == 0.0) return 1.0;
  if (lambda_plus_a > 0.0) return std::pow(lambda_plus_a, p);
  const bool integral = p == std::floor(p);
  detail::require(!(lambda_plus_a == 0.0 && p < 0.0), "fractional power: (lambda + a) = 0 with negative exponent");
  detail::require(lambda_plus_a == 0.0 || integral, "fractional power: (lambda + a) < 0 with non-integral exponent");
  return std::pow(lambda_plus_a, p);
}

/// sum_n (lambda_n + a)^p <f, phi_n> phi_n; requires the full spectrum.
inline Eigen::VectorXd fractional_apply(const EigenSystem& eig, double p, double a, const Eigen::VectorXd& f) {
  detail::require(eig.complete(), "fractional_apply needs a full decomposition");
  Eigen::VectorXd c = eig.coefficients(f);
  for (Eigen::Index n = 0; n < c.size(); ++n) c[n] *= spectral_power(eig.eigenvalues[n] + a, p);
  return eig.eigenvectors * c;
}

/// ||(H+a)^p f||_sigma from spectral coefficients. For partial systems f must lie in the
/// span of the computed eigenvectors (checked to 1e-8 relative).
inline double spectral_power_norm(const EigenSystem& eig, const Eigen::VectorXd& coeffs, double p, double a) {
  double s = 0.0;
  for (Eigen::Index n = 0; n < coeffs.size(); ++n) {
    const double w = spectral_power(eig.eigenvalues[n] + a, p);
    s += w * w * coeffs[n] * coeffs[n];
  }
  return std::sqrt(s);
}

inline Eigen::VectorXd span_coefficients(const EigenSystem& eig, const Eigen::VectorXd& f) {
  Eigen::VectorXd c = eig.coefficients(f);
  if (!eig.complete()) {
    const Eigen::VectorXd r = f - eig.eigenvectors * c;
    const double rn = std::sqrt(r.cwiseProduct(r).dot(eig.measure));
    const double fn = std::sqrt(f.cwiseProduct(f).dot(eig.measure));
    detail::require(rn <= 1e-8 * std::max(fn, 1e-300),
                    "vector is not in the span of the computed eigenvectors; use a full decomposition");
  }
  return c;
}

struct HeatDiagonal {
  Eigen::VectorXd values;        // K(t,x,x) per interior node
  double truncation_bound = 0.0;  // bound on the omitted part of sum_n e^{-lambda_n t}
};

inline double truncation_tail(const EigenSystem& eig, double t) {
  if (eig.complete()) return 0.0;
  return static_cast<double>(eig.dimension - eig.count()) * std::exp(-eig.eigenvalues[eig.eigenvalues.size() - 1] * t);
}

inline HeatDiagonal heat_diag(const EigenSystem& eig, double t) {
  detail::require(t > 0.0, "heat_diag: t must be positive");
  Eigen::VectorXd w = (-t * eig.eigenvalues).array().exp().matrix();
  HeatDiagonal out;
  out.values = eig.eigenvectors.array().square().matrix() * w;
  out.truncation_bound = truncation_tail(eig, t);
  return out;
}

inline double heat_trace(const EigenSystem& eig, double t) {
  detail::require(t > 0.0, "heat_trace: t must be positive");
  return (-t * eig.eigenvalues).array().exp().sum();
}

/// N(lambda) = #{n : lambda_n < lambda}.
inline std::size_t counting(const EigenSystem& eig, double lambda) {
  detail::require(eig.complete() || lambda <= eig.eigenvalues[eig.eigenvalues.size() - 1],
                  "counting: lambda above the computed part of the spectrum");
  std::size_t n = 0;
  while (n < eig.count() && eig.lambda(n) < lambda) ++n;
  return n;
}

/// N(eps, lambda) = sum_{lambda_n < lambda} sum_{x in strip} |phi_n(x)|^2 sigma^2 h^dim.
inline double strip_counting(const EigenSystem& eig, const std::vector<std::size_t>& strip, double lambda) {
  const std::size_t nl = counting(eig, lambda);
  double total = 0.0;
  for (std::size_t k = 0; k < nl; ++k)
    for (auto x : strip) {
      const double v = eig.eigenvectors(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(k));
      total += v * v * eig.measure[static_cast<Eigen::Index>(x)];
    }
  return total;
}

struct HardyEstimate {
  double c_num = 0.0;
  double theta_min = 0.0;  // min (Q(f) + a||f||^2) / ||f/d||^2
  std::string method;
};

/// Best constant of the discrete Hardy inequality for (op, d~), from the lowest
/// eigenvalue of (H + a) f = theta d~^-2 f.
inline HardyEstimate estimate_hardy_constant(const EllipticOperator& op, const DistanceField& dist,
                                             const SolverOptions& opts = {}) {
  detail::require(static_cast<std::size_t>(dist.values.size()) == op.size(), "estimate_hardy_constant: size mismatch");
  const Eigen::VectorXd dscaled = op.distance_scale * dist.values;
  const Eigen::VectorXd dsc = dscaled.cwiseQuotient(op.measure.cwiseSqrt());
  Eigen::SparseMatrix<double> b = op.stiffness;
  if (op.hardy_a != 0.0) {
    Eigen::SparseMatrix<double> m(b.rows(), b.cols());
    m.reserve(Eigen::VectorXi::Constant(b.cols(), 1));
    for (Eigen::Index i = 0; i < b.rows(); ++i) m.insert(i, i) = op.hardy_a * op.measure[i];
    b += m;
  }
  b = (dsc.asDiagonal() * b * dsc.asDiagonal()).eval();
  HardyEstimate out;
  if (op.size() <= opts.sparse_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(b), Eigen::EigenvaluesOnly);
    detail::require(es.info() == Eigen::Success, "Hardy eigenproblem failed", ErrorKind::numerical);
    out.theta_min = es.eigenvalues()[0];
    out.method = "dense";
  } else {
    SolverOptions o = opts;
    o.tolerance = std::min(opts.tolerance, 1e-10);
    auto [values, vectors] = detail::lowest_eigenpairs(b, std::min<std::size_t>(4, op.size()), o);
    out.theta_min = values[0];
    out.method = "subspace";
  }
  detail::require(out.theta_min > 0.0, "Hardy eigenproblem: nonpositive lowest eigenvalue", ErrorKind::numerical);
  out.c_num = 1.0 / std::sqrt(out.theta_min);
  return out;
}

}  // namespace decaylab
