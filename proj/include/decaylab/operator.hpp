#pragma once

// Discrete self-adjoint operators H = -sigma^-2 div(sigma^2 grad) + V and
// H = -div(a grad) with Dirichlet conditions on the exterior lattice nodes.
//
// Storage convention: the quadratic form is Q(f) = f^T K f with K symmetric, and the
// weighted measure is the diagonal M = sigma^2 h^dim.  Then H = M^-1 K and
// <Hf, g>_sigma = g^T K f, so every spectral computation works on
// S = M^-1/2 K M^-1/2.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "decaylab/geometry.hpp"

namespace decaylab {

struct WeightField {
  std::string description = "one";
  std::function<double(Point)> sigma = [](Point) { return 1.0; };
  // Evaluate sigma^2 at face midpoints instead of the geometric mean of the endpoints.
  bool face_midpoint = false;
  double alpha_w = 0.0;
};

inline WeightField unit_weight() { return {}; }

/// sigma(x) = x^(alpha_w / 2); faces use the midpoint so the node at x = 0 is never sampled.
inline WeightField power_weight(double alpha_w) {
  detail::require(alpha_w >= 0.0 && alpha_w < 1.0, "power weight: alpha_w must lie in [0,1)");
  WeightField w;
  w.description = "power(" + detail::fmt_num(alpha_w) + ")";
  w.sigma = [alpha_w](Point p) { return std::pow(std::max(p.x, 0.0), 0.5 * alpha_w); };
  w.face_midpoint = true;
  w.alpha_w = alpha_w;
  return w;
}

struct PotentialField {
  std::string description = "zero";
  std::function<double(Point)> v = [](Point) { return 0.0; };
};

inline PotentialField constant_potential(double value) {
  return {"const(" + detail::fmt_num(value) + ")", [value](Point) { return value; }};
}

struct CoefficientField {
  std::string description = "identity";
  std::function<Eigen::Matrix2d(Point)> a = [](Point) { return Eigen::Matrix2d::Identity().eval(); };
  double alpha = 1.0;  // ellipticity: 1 <= a(x) <= alpha^2
};

inline CoefficientField identity_coefficient() { return {}; }

inline CoefficientField scalar_coefficient(double k) {
  detail::require(k >= 1.0, "scalar coefficient must be >= 1 (ellipticity 1 <= a)");
  return {"scalar(" + detail::fmt_num(k) + ")", [k](Point) { return (k * Eigen::Matrix2d::Identity()).eval(); },
          std::sqrt(k)};
}

inline CoefficientField diagonal_coefficient(double ax, double ay) {
  detail::require(ax >= 1.0 && ay >= 1.0, "diagonal coefficient entries must be >= 1");
  Eigen::Matrix2d m = Eigen::Vector2d(ax, ay).asDiagonal();
  return {"diag(" + detail::fmt_num(ax) + "," + detail::fmt_num(ay) + ")", [m](Point) { return m; },
          std::sqrt(std::max(ax, ay))};
}

/// Alternating I / alpha^2 I on square cells of side 1/cells_per_unit.
inline CoefficientField checkerboard_coefficient(double alpha, double cells_per_unit) {
  detail::require(alpha >= 1.0 && cells_per_unit > 0.0, "checkerboard: need alpha >= 1 and cells > 0");
  const double a2 = alpha * alpha;
  return {"checkerboard(" + detail::fmt_num(alpha) + "," + detail::fmt_num(cells_per_unit) + ")",
          [a2, cells_per_unit](Point p) {
            const auto ix = static_cast<long long>(std::floor(p.x * cells_per_unit));
            const auto iy = static_cast<long long>(std::floor(p.y * cells_per_unit));
            const bool odd = ((ix + iy) % 2 + 2) % 2 == 1;
            return (odd ? a2 : 1.0) * Eigen::Matrix2d::Identity();
          },
          alpha};
}

enum class OperatorKind { weighted_laplacian, one_d_weighted, divergence_form };

inline const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::weighted_laplacian: return "weighted_laplacian";
    case OperatorKind::one_d_weighted: return "one_d_weighted";
    case OperatorKind::divergence_form: return "divergence_form";
  }
  return "unknown";
}

/// Everything needed to reassemble the same operator on another mask of the lattice.
struct OperatorRecipe {
  OperatorKind kind = OperatorKind::weighted_laplacian;
  WeightField weight;
  PotentialField potential;
  CoefficientField coefficient;
  std::optional<double> hardy_c;
  std::optional<double> hardy_a;
};

/// Lattice face between interior node `lo` and `hi`; hi == -1 is a face to a Dirichlet node.
struct Face {
  std::ptrdiff_t lo = -1;
  std::ptrdiff_t hi = -1;
  std::size_t lattice_lo = 0;
  std::size_t lattice_hi = 0;
  int axis = 0;
  double weight = 1.0;       // stiffness weight (sigma^2 or a^{ii})
  double grad_weight = 1.0;  // weight for |grad f|^2 sigma^2 quadrature
};

struct EllipticOperator {
  std::shared_ptr<const GridDomain> domain;
  OperatorRecipe recipe;
  Eigen::SparseMatrix<double> stiffness;  // K
  Eigen::VectorXd measure;                // sigma^2 h^dim per interior node
  std::vector<Face> faces;
  double hardy_c = 2.0;
  double hardy_a = 0.0;
  double distance_scale = 1.0;  // d~ = distance_scale * d (1/alpha for divergence form)

  OperatorKind kind() const { return recipe.kind; }
  std::size_t size() const { return static_cast<std::size_t>(measure.size()); }

  std::string describe() const {
    std::string s = to_string(recipe.kind);
    if (recipe.kind == OperatorKind::divergence_form) return s + " " + recipe.coefficient.description;
    s += " sigma=" + recipe.weight.description;
    if (recipe.potential.description != "zero") s += " V=" + recipe.potential.description;
    return s;
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const {
    detail::require(static_cast<std::size_t>(f.size()) == size(), "operator apply: dimension mismatch");
    return (stiffness * f).cwiseQuotient(measure);
  }

  /// S = M^-1/2 K M^-1/2, symmetric.
  Eigen::SparseMatrix<double> symmetrized() const {
    Eigen::VectorXd s = measure.cwiseSqrt().cwiseInverse();
    return (s.asDiagonal() * stiffness * s.asDiagonal()).eval();
  }
};

namespace detail {

inline double default_hardy_c(const GridDomain& dom) {
  if (dom.dim == 1 || dom.convex()) return 2.0;
  return 4.0;
}

inline Point face_midpoint(const GridDomain& dom, std::size_t a, std::size_t b) {
  return 0.5 * (dom.position(a) + dom.position(b));
}

}  // namespace detail

/// Assembles the operator described by `recipe` on `dom`.
inline EllipticOperator assemble(std::shared_ptr<const GridDomain> dom, const OperatorRecipe& recipe) {
  using detail::require;
  require(dom != nullptr && dom->size() > 0, "assemble: empty domain", ErrorKind::domain);
  const GridDomain& g = *dom;
  const double h = g.h;
  const double cell = g.measure_per_node();
  const bool divergence = recipe.kind == OperatorKind::divergence_form;

  EllipticOperator op;
  op.domain = dom;
  op.recipe = recipe;
  const auto n = static_cast<Eigen::Index>(g.size());
  op.measure.resize(n);
  Eigen::VectorXd sigma(n);
  Eigen::VectorXd potential(n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = g.interior_position(i);
    const double s = divergence ? 1.0 : recipe.weight.sigma(p);
    require(s > 0.0 && std::isfinite(s), "weight sigma must be positive on the interior");
    const double v = divergence ? 0.0 : recipe.potential.v(p);
    require(v >= 0.0 && std::isfinite(v), "potential V must be nonnegative");
    sigma[static_cast<Eigen::Index>(i)] = s;
    potential[static_cast<Eigen::Index>(i)] = v;
    op.measure[static_cast<Eigen::Index>(i)] = s * s * cell;
  }

  auto face_weight = [&](std::size_t la, std::size_t lb, int axis) {
    if (divergence) {
      const Eigen::Matrix2d a = recipe.coefficient.a(detail::face_midpoint(g, la, lb));
      require(std::abs(a(0, 1)) < 1e-14 && std::abs(a(1, 0)) < 1e-14,
              "divergence form: only diagonal coefficient tensors are supported");
      const double alpha2 = recipe.coefficient.alpha * recipe.coefficient.alpha;
      const double lo = std::min(a(0, 0), a(1, 1)), hi = std::max(a(0, 0), a(1, 1));
      require(lo >= 1.0 - 1e-12 && hi <= alpha2 * (1.0 + 1e-12),
              "divergence form: ellipticity 1 <= a <= alpha^2 violated");
      return a(axis, axis);
    }
    double s2 = 0.0;
    if (recipe.weight.face_midpoint) {
      const double s = recipe.weight.sigma(detail::face_midpoint(g, la, lb));
      s2 = s * s;
    } else {
      s2 = recipe.weight.sigma(g.position(la)) * recipe.weight.sigma(g.position(lb));
    }
    require(s2 > 0.0 && std::isfinite(s2), "weight sigma must be positive on faces");
    return s2;
  };

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * (2 * static_cast<std::size_t>(g.dim) + 1));
  const double scale = cell / (h * h);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t k = g.interior[i];
    for (int axis = 0; axis < g.dim; ++axis) {
      for (int dir : {1, -1}) {
        const auto nb = static_cast<std::size_t>(g.neighbor(k, axis, dir));
        const auto j = g.interior_index[nb];
        if (dir == -1 && j >= 0) continue;  // interior faces are visited once, from the lower node
        Face f;
        f.lo = static_cast<std::ptrdiff_t>(i);
        f.hi = j;
        f.lattice_lo = k;
        f.lattice_hi = nb;
        f.axis = axis;
        f.weight = face_weight(k, nb, axis);
        f.grad_weight = divergence ? 1.0 : f.weight;
        op.faces.push_back(f);
        const double w = f.weight * scale;
        trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), w);
        if (j >= 0) {
          trip.emplace_back(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j), w);
          trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), -w);
          trip.emplace_back(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i), -w);
        }
      }
    }
    const double v = potential[static_cast<Eigen::Index>(i)];
    if (v != 0.0) trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), v * op.measure[static_cast<Eigen::Index>(i)]);
  }
  op.stiffness.resize(n, n);
  op.stiffness.setFromTriplets(trip.begin(), trip.end());
  op.stiffness.makeCompressed();

  switch (recipe.kind) {
    case OperatorKind::weighted_laplacian:
      op.hardy_c = detail::default_hardy_c(g);
      break;
    case OperatorKind::one_d_weighted:
      op.hardy_c = 2.0 / (1.0 - recipe.weight.alpha_w);
      break;
    case OperatorKind::divergence_form:
      op.hardy_c = detail::default_hardy_c(g) * recipe.coefficient.alpha;
      op.distance_scale = 1.0 / recipe.coefficient.alpha;
      break;
  }
  if (recipe.hardy_c) op.hardy_c = *recipe.hardy_c;
  if (recipe.hardy_a) op.hardy_a = *recipe.hardy_a;
  require(op.hardy_c >= 2.0, "Hardy constant c must be >= 2");
  require(op.hardy_a >= 0.0, "Hardy constant a must be >= 0");
  return op;
}

inline EllipticOperator assemble_weighted_laplacian(std::shared_ptr<const GridDomain> dom, WeightField sigma = {},
                                                    PotentialField v = {}) {
  OperatorRecipe r;
  r.kind = OperatorKind::weighted_laplacian;
  r.weight = std::move(sigma);
  r.potential = std::move(v);
  return assemble(std::move(dom), r);
}

/// -x^-alpha (x^alpha f')' on (0, L), Dirichlet at both ends, d(x) = x.
inline EllipticOperator assemble_1d_weighted(double alpha_w, double length, double h, std::size_t node_cap = 20000) {
  DomainSpec spec{Generator::halfline_truncated, {length}, h, {}, node_cap};
  auto dom = std::make_shared<const GridDomain>(build_domain(spec));
  OperatorRecipe r;
  r.kind = OperatorKind::one_d_weighted;
  r.weight = power_weight(alpha_w);
  r.hardy_a = 0.0;
  return assemble(std::move(dom), r);
}

inline EllipticOperator assemble_divergence_form(std::shared_ptr<const GridDomain> dom, CoefficientField coeff) {
  OperatorRecipe r;
  r.kind = OperatorKind::divergence_form;
  r.coefficient = std::move(coeff);
  return assemble(std::move(dom), r);
}

/// Same fields on a different mask of the same lattice (used for U_eps).
inline EllipticOperator reassemble(const EllipticOperator& op, std::shared_ptr<const GridDomain> dom) {
  EllipticOperator out = assemble(std::move(dom), op.recipe);
  out.hardy_c = op.hardy_c;
  out.hardy_a = op.hardy_a;
  out.distance_scale = op.distance_scale;
  return out;
}

/// Q(f) = <Hf, f>_sigma.
inline double quadratic_form(const EllipticOperator& op, const Eigen::VectorXd& f) {
  detail::require(static_cast<std::size_t>(f.size()) == op.size(), "quadratic_form: dimension mismatch");
  return f.dot(op.stiffness * f);
}

inline double weighted_inner(const EllipticOperator& op, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  detail::require(static_cast<std::size_t>(f.size()) == op.size() && static_cast<std::size_t>(g.size()) == op.size(),
                  "weighted_inner: dimension mismatch");
  return (f.cwiseProduct(g)).dot(op.measure);
}

inline double weighted_norm(const EllipticOperator& op, const Eigen::VectorXd& f) {
  return std::sqrt(weighted_inner(op, f, f));
}

/// Values of an interior vector at the two ends of a face (0 on Dirichlet nodes).
inline std::pair<double, double> face_values(const Face& face, const Eigen::VectorXd& f) {
  return {f[face.lo], face.hi >= 0 ? f[face.hi] : 0.0};
}

/// Nodal |grad g|^2 (times the face weight): half the sum over incident faces of
/// w (g_y - g_x)^2 / h^2, i.e. the per-axis average of the two one-sided differences.
/// `lattice_values` holds g on every lattice node so Dirichlet-side faces see the
/// exterior value of the field.
inline Eigen::VectorXd nodal_gradient_squared(const EllipticOperator& op, const Eigen::VectorXd& lattice_values,
                                              bool use_grad_weight = false) {
  const double h2 = op.domain->h * op.domain->h;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.size()));
  for (const auto& face : op.faces) {
    const double diff = lattice_values[static_cast<Eigen::Index>(face.lattice_hi)] -
                        lattice_values[static_cast<Eigen::Index>(face.lattice_lo)];
    const double term = 0.5 * (use_grad_weight ? face.grad_weight : face.weight) * diff * diff / h2;
    out[face.lo] += term;
    if (face.hi >= 0) out[face.hi] += term;
  }
  return out;
}

}  // namespace decaylab
