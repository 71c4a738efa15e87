#pragma once

// Masked uniform lattices standing in for a bounded region U, the exact
// distance to its boundary, and the derived regions {d > eps} and {d < eps}.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decaylab/error.hpp"

namespace decaylab {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }

/// Closed segment; a == b is allowed and represents a single boundary point.
struct Segment {
  Point a;
  Point b;
};

struct Circle {
  Point center;
  double radius = 0.0;
};

/// The boundary set distances are measured to.
struct BoundaryGeometry {
  std::vector<Segment> segments;
  std::vector<Circle> circles;
};

enum class Generator {
  interval,
  halfline_truncated,
  rectangle,
  disk,
  lshape,
  slit_square,
  koch_prefractal,
  mask_file,
  derived,
};

inline const char* to_string(Generator g) {
  switch (g) {
    case Generator::interval: return "interval";
    case Generator::halfline_truncated: return "halfline_truncated";
    case Generator::rectangle: return "rectangle";
    case Generator::disk: return "disk";
    case Generator::lshape: return "lshape";
    case Generator::slit_square: return "slit_square";
    case Generator::koch_prefractal: return "koch_prefractal";
    case Generator::mask_file: return "mask_file";
    case Generator::derived: return "derived";
  }
  return "unknown";
}

inline Generator generator_from_string(const std::string& s) {
  for (auto g : {Generator::interval, Generator::halfline_truncated, Generator::rectangle,
                 Generator::disk, Generator::lshape, Generator::slit_square,
                 Generator::koch_prefractal, Generator::mask_file}) {
    if (s == to_string(g)) return g;
  }
  detail::fail(ErrorKind::config, "unknown domain generator '" + s + "'");
}

/// Parameter layout per generator:
///   interval(L), halfline_truncated(L), rectangle(Lx, Ly), disk(R), lshape(L),
///   slit_square(L, slit_len), koch_prefractal(level [, side = 1]), mask_file().
struct DomainSpec {
  Generator generator = Generator::interval;
  std::vector<double> params;
  double resolution = 0.0;
  std::string mask_path;
  std::size_t node_cap = 20000;
};

struct GridDomain {
  int dim = 1;
  std::array<int, 2> shape{0, 1};   // lattice node counts per axis, padding included
  std::array<int, 2> offset{0, 0};  // lattice index of node (0,0); position = (i + offset) * h
  double h = 0.0;
  std::vector<std::uint8_t> mask;   // 1 = node lies in U
  std::vector<std::size_t> interior;       // lattice indices of interior nodes, ascending
  std::vector<std::ptrdiff_t> interior_index;  // lattice index -> interior index or -1
  std::vector<std::size_t> boundary_nodes;  // exterior nodes with an interior neighbour
  BoundaryGeometry boundary;
  Generator generator = Generator::interval;
  std::vector<double> params;
  std::string name;

  std::size_t size() const { return interior.size(); }
  std::size_t lattice_size() const { return mask.size(); }

  std::size_t lattice_index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(shape[0]) +
           static_cast<std::size_t>(i);
  }

  std::array<int, 2> lattice_coords(std::size_t k) const {
    return {static_cast<int>(k % static_cast<std::size_t>(shape[0])),
            static_cast<int>(k / static_cast<std::size_t>(shape[0]))};
  }

  Point position(std::size_t k) const {
    auto [i, j] = lattice_coords(k);
    return {(i + offset[0]) * h, dim == 2 ? (j + offset[1]) * h : 0.0};
  }

  Point interior_position(std::size_t n) const { return position(interior[n]); }

  /// Lattice neighbour along `axis` in direction `dir` (+1/-1); -1 when off the lattice.
  std::ptrdiff_t neighbor(std::size_t k, int axis, int dir) const {
    auto c = lattice_coords(k);
    c[static_cast<std::size_t>(axis)] += dir;
    if (c[0] < 0 || c[0] >= shape[0] || c[1] < 0 || c[1] >= shape[1]) return -1;
    return static_cast<std::ptrdiff_t>(lattice_index(c[0], c[1]));
  }

  /// Convex generators carry the folklore Hardy constant c = 2.
  bool convex() const {
    return generator == Generator::interval || generator == Generator::halfline_truncated ||
           generator == Generator::rectangle || generator == Generator::disk;
  }

  double measure_per_node() const { return dim == 1 ? h : h * h; }
};

struct DistanceField {
  Eigen::VectorXd values;  // per interior node
  std::string source;

  double max() const { return values.size() ? values.maxCoeff() : 0.0; }
  double min() const { return values.size() ? values.minCoeff() : 0.0; }
};

namespace detail {

inline double point_segment_distance(Point p, const Segment& s) {
  const Point ab = s.b - s.a;
  const Point ap = p - s.a;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp((ap.x * ab.x + ap.y * ab.y) / len2, 0.0, 1.0);
  const Point q = s.a + t * ab;
  return std::hypot(p.x - q.x, p.y - q.y);
}

inline double boundary_distance(Point p, const BoundaryGeometry& g) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : g.segments) best = std::min(best, point_segment_distance(p, s));
  for (const auto& c : g.circles)
    best = std::min(best, std::abs(c.radius - std::hypot(p.x - c.center.x, p.y - c.center.y)));
  return best;
}

/// Crossing-number test; points on an edge are resolved arbitrarily (they get d = 0 anyway).
inline bool inside_polygon(Point p, const std::vector<Point>& poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point a = poly[i];
    const Point b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xc) in = !in;
    }
  }
  return in;
}

inline std::vector<Segment> polygon_segments(const std::vector<Point>& poly) {
  std::vector<Segment> out;
  out.reserve(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) out.push_back({poly[i], poly[(i + 1) % poly.size()]});
  return out;
}

/// Closed Koch snowflake polygon (counter-clockwise, outward bumps), 4^level edges per side.
inline std::vector<Point> koch_snowflake(int level, double side) {
  const double r3 = std::sqrt(3.0);
  std::vector<Point> poly{{0.0, 0.0}, {side, 0.0}, {0.5 * side, 0.5 * r3 * side}};
  const double c = 0.5;              // cos(-60 deg)
  const double s = -0.5 * r3;        // sin(-60 deg)
  for (int l = 0; l < level; ++l) {
    std::vector<Point> next;
    next.reserve(poly.size() * 4);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point p = poly[i];
      const Point q = poly[(i + 1) % poly.size()];
      const Point third = (1.0 / 3.0) * (q - p);
      const Point p1 = p + third;
      const Point apex = p1 + Point{c * third.x - s * third.y, s * third.x + c * third.y};
      const Point p2 = p + 2.0 * third;
      next.insert(next.end(), {p, p1, apex, p2});
    }
    poly = std::move(next);
  }
  return poly;
}

inline void finalize_domain(GridDomain& dom, bool require_connected) {
  const std::size_t total = dom.mask.size();
  dom.interior.clear();
  dom.interior_index.assign(total, -1);
  for (std::size_t k = 0; k < total; ++k) {
    if (dom.mask[k]) {
      dom.interior_index[k] = static_cast<std::ptrdiff_t>(dom.interior.size());
      dom.interior.push_back(k);
    }
  }
  dom.boundary_nodes.clear();
  for (std::size_t k = 0; k < total; ++k) {
    if (dom.mask[k]) continue;
    bool adjacent = false;
    for (int axis = 0; axis < dom.dim && !adjacent; ++axis)
      for (int dir : {-1, 1}) {
        auto nb = dom.neighbor(k, axis, dir);
        if (nb >= 0 && dom.mask[static_cast<std::size_t>(nb)]) adjacent = true;
      }
    if (adjacent) dom.boundary_nodes.push_back(k);
  }
  for (std::size_t k : dom.interior) {
    for (int axis = 0; axis < dom.dim; ++axis)
      for (int dir : {-1, 1})
        require(dom.neighbor(k, axis, dir) >= 0, "interior node on the lattice edge; mask needs padding",
                ErrorKind::domain);
  }
  if (require_connected && !dom.interior.empty()) {
    std::vector<std::uint8_t> seen(total, 0);
    std::queue<std::size_t> q;
    q.push(dom.interior.front());
    seen[dom.interior.front()] = 1;
    std::size_t reached = 0;
    while (!q.empty()) {
      auto k = q.front();
      q.pop();
      ++reached;
      for (int axis = 0; axis < dom.dim; ++axis)
        for (int dir : {-1, 1}) {
          auto nb = dom.neighbor(k, axis, dir);
          if (nb >= 0 && dom.mask[static_cast<std::size_t>(nb)] && !seen[static_cast<std::size_t>(nb)]) {
            seen[static_cast<std::size_t>(nb)] = 1;
            q.push(static_cast<std::size_t>(nb));
          }
        }
    }
    require(reached == dom.interior.size(),
            "interior mask of " + dom.name + " is disconnected at this resolution", ErrorKind::domain);
  }
}

template <class Inside>
GridDomain rasterize(int dim, double h, Point lo, Point hi, const BoundaryGeometry& geom, Inside inside,
                     Generator gen, std::vector<double> params, std::string name, std::size_t cap) {
  GridDomain dom;
  dom.dim = dim;
  dom.h = h;
  dom.generator = gen;
  dom.params = std::move(params);
  dom.name = std::move(name);
  dom.boundary = geom;
  const int i0 = static_cast<int>(std::floor(lo.x / h + 1e-9)) - 1;
  const int i1 = static_cast<int>(std::ceil(hi.x / h - 1e-9)) + 1;
  dom.offset[0] = i0;
  dom.shape[0] = i1 - i0 + 1;
  if (dim == 2) {
    const int j0 = static_cast<int>(std::floor(lo.y / h + 1e-9)) - 1;
    const int j1 = static_cast<int>(std::ceil(hi.y / h - 1e-9)) + 1;
    dom.offset[1] = j0;
    dom.shape[1] = j1 - j0 + 1;
  } else {
    dom.offset[1] = 0;
    dom.shape[1] = 1;
  }
  dom.mask.assign(static_cast<std::size_t>(dom.shape[0]) * static_cast<std::size_t>(dom.shape[1]), 0);
  // Interior nodes sit at least one lattice step from the boundary, so d >= h on U.
  const double dmin = h * (1.0 - 1e-9);
  std::size_t count = 0;
  for (std::size_t k = 0; k < dom.mask.size(); ++k) {
    const Point p = dom.position(k);
    if (inside(p) && boundary_distance(p, geom) >= dmin) {
      dom.mask[k] = 1;
      ++count;
    }
  }
  require(count > 0, "resolution too coarse: " + dom.name + " has an empty interior", ErrorKind::domain);
  require(count <= cap,
          dom.name + " has " + std::to_string(count) + " interior nodes, above the node cap " +
              std::to_string(cap),
          ErrorKind::domain);
  finalize_domain(dom, true);
  return dom;
}

inline double snap_spacing(double length, double target) {
  const double n = std::max(1.0, std::round(length / target));
  return length / n;
}

inline std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline GridDomain read_mask_file(const std::string& path, std::size_t cap) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot read mask file '" + path + "'", ErrorKind::io);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  int dim = 0;
  hs >> dim;
  require(dim == 1 || dim == 2, "mask file: dim must be 1 or 2", ErrorKind::io);
  int nx = 0, ny = 1;
  double h = 0.0;
  hs >> nx;
  if (dim == 2) hs >> ny;
  hs >> h;
  require(static_cast<bool>(hs) && nx > 0 && ny > 0 && h > 0.0, "mask file: malformed header '" + header + "'",
          ErrorKind::io);
  std::vector<std::string> rows;
  std::string line;
  while (static_cast<int>(rows.size()) < ny && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    require(static_cast<int>(line.size()) == nx, "mask file: row length differs from header", ErrorKind::io);
    for (char ch : line) require(ch == '0' || ch == '1', "mask file: rows must hold 0/1 characters", ErrorKind::io);
    rows.push_back(line);
  }
  require(static_cast<int>(rows.size()) == ny, "mask file: expected " + std::to_string(ny) + " rows",
          ErrorKind::io);

  GridDomain dom;
  dom.dim = dim;
  dom.h = h;
  dom.generator = Generator::mask_file;
  dom.name = "mask(" + path + ")";
  dom.shape = {nx + 2, dim == 2 ? ny + 2 : 1};
  dom.offset = {-1, dim == 2 ? -1 : 0};
  dom.mask.assign(static_cast<std::size_t>(dom.shape[0]) * static_cast<std::size_t>(dom.shape[1]), 0);
  std::size_t count = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] == '1') {
        dom.mask[dom.lattice_index(i + 1, dim == 2 ? j + 1 : 0)] = 1;
        ++count;
      }
  require(count > 0, "mask file: empty interior", ErrorKind::domain);
  require(count <= cap, "mask file: node cap exceeded", ErrorKind::domain);
  finalize_domain(dom, false);
  for (auto k : dom.boundary_nodes) {
    const Point p = dom.position(k);
    dom.boundary.segments.push_back({p, p});
  }
  return dom;
}

}  // namespace detail

/// Rasterizes a catalogue domain. Interior nodes are the lattice points strictly
/// inside the region whose distance to the boundary is at least h.
inline GridDomain build_domain(const DomainSpec& spec) {
  using detail::require;
  const auto& p = spec.params;
  auto need = [&](std::size_t n) {
    require(p.size() >= n, std::string(to_string(spec.generator)) + " needs " + std::to_string(n) + " parameter(s)");
  };
  if (spec.generator == Generator::mask_file) return detail::read_mask_file(spec.mask_path, spec.node_cap);
  require(spec.resolution > 0.0, "resolution must be positive");
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool level = spec.generator == Generator::koch_prefractal && i == 0;
    require((p[i] > 0.0 || (level && p[i] == 0.0)) && std::isfinite(p[i]), "generator parameters must be positive");
  }

  const auto name_of = [&](double h) {
    std::string s = std::string(to_string(spec.generator)) + "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + detail::fmt_num(p[i]);
    return s + ") h=" + detail::fmt_num(h);
  };

  switch (spec.generator) {
    case Generator::interval:
    case Generator::halfline_truncated: {
      need(1);
      const double L = p[0];
      const double h = detail::snap_spacing(L, spec.resolution);
      BoundaryGeometry g;
      g.segments.push_back({{0.0, 0.0}, {0.0, 0.0}});
      // The far end of the truncated half-line is a numerical cut, not part of the boundary.
      if (spec.generator == Generator::interval) g.segments.push_back({{L, 0.0}, {L, 0.0}});
      return detail::rasterize(
          1, h, {0.0, 0.0}, {L, 0.0}, g, [L](Point q) { return q.x > 0.0 && q.x < L * (1.0 - 1e-12); },
          spec.generator, p, name_of(h), spec.node_cap);
    }
    case Generator::rectangle: {
      need(2);
      const double lx = p[0], ly = p[1];
      const double h = detail::snap_spacing(lx, spec.resolution);
      std::vector<Point> poly{{0, 0}, {lx, 0}, {lx, ly}, {0, ly}};
      BoundaryGeometry g{detail::polygon_segments(poly), {}};
      return detail::rasterize(
          2, h, {0, 0}, {lx, ly}, g, [&](Point q) { return detail::inside_polygon(q, poly); }, spec.generator, p,
          name_of(h), spec.node_cap);
    }
    case Generator::disk: {
      need(1);
      const double r = p[0];
      const double h = spec.resolution;
      BoundaryGeometry g{{}, {Circle{{0.0, 0.0}, r}}};
      return detail::rasterize(
          2, h, {-r, -r}, {r, r}, g, [r](Point q) { return std::hypot(q.x, q.y) < r; }, spec.generator, p,
          name_of(h), spec.node_cap);
    }
    case Generator::lshape: {
      need(1);
      const double L = p[0];
      const double h = detail::snap_spacing(0.5 * L, spec.resolution);
      std::vector<Point> poly{{0, 0}, {L, 0}, {L, 0.5 * L}, {0.5 * L, 0.5 * L}, {0.5 * L, L}, {0, L}};
      BoundaryGeometry g{detail::polygon_segments(poly), {}};
      return detail::rasterize(
          2, h, {0, 0}, {L, L}, g, [&](Point q) { return detail::inside_polygon(q, poly); }, spec.generator, p,
          name_of(h), spec.node_cap);
    }
    case Generator::slit_square: {
      need(2);
      const double L = p[0], slit = p[1];
      require(slit < L, "slit_square: slit length must be shorter than the side");
      const double h = detail::snap_spacing(0.5 * L, spec.resolution);
      std::vector<Point> poly{{0, 0}, {L, 0}, {L, L}, {0, L}};
      BoundaryGeometry g{detail::polygon_segments(poly), {}};
      g.segments.push_back({{0.0, 0.5 * L}, {slit, 0.5 * L}});
      return detail::rasterize(
          2, h, {0, 0}, {L, L}, g, [&](Point q) { return detail::inside_polygon(q, poly); }, spec.generator, p,
          name_of(h), spec.node_cap);
    }
    case Generator::koch_prefractal: {
      need(1);
      const double lv = p[0];
      require(lv == std::floor(lv) && lv >= 0 && lv <= 4, "koch_prefractal: level must be an integer in [0,4]");
      const int level = static_cast<int>(lv);
      const double side = p.size() > 1 ? p[1] : 1.0;
      const double smallest = side / std::pow(3.0, level);
      require(spec.resolution <= smallest / 3.0 * (1.0 + 1e-12),
              "koch_prefractal: h must resolve the smallest segment (h <= " + detail::fmt_num(smallest / 3.0) + ")",
              ErrorKind::domain);
      auto poly = detail::koch_snowflake(level, side);
      Point lo{poly[0].x, poly[0].y}, hi = lo;
      for (auto q : poly) {
        lo = {std::min(lo.x, q.x), std::min(lo.y, q.y)};
        hi = {std::max(hi.x, q.x), std::max(hi.y, q.y)};
      }
      BoundaryGeometry g{detail::polygon_segments(poly), {}};
      return detail::rasterize(
          2, spec.resolution, lo, hi, g, [&](Point q) { return detail::inside_polygon(q, poly); }, spec.generator,
          p, name_of(spec.resolution), spec.node_cap);
    }
    default:
      detail::fail(ErrorKind::invalid_argument, "build_domain: unsupported generator");
  }
}

/// Exact Euclidean distance from every interior node to the boundary set (brute force).
inline DistanceField distance_to_boundary(const GridDomain& dom) {
  DistanceField out;
  out.values.resize(static_cast<Eigen::Index>(dom.size()));
  for (std::size_t n = 0; n < dom.size(); ++n)
    out.values[static_cast<Eigen::Index>(n)] = detail::boundary_distance(dom.interior_position(n), dom.boundary);
  out.source = dom.generator == Generator::halfline_truncated ? "left endpoint" : "full boundary";
  return out;
}

/// U_eps = {x in U : d(x) > eps} on the parent lattice.
inline GridDomain inner_region(const GridDomain& dom, const DistanceField& dist, double eps) {
  detail::require(eps >= 0.0, "inner_region: eps must be nonnegative");
  detail::require(static_cast<std::size_t>(dist.values.size()) == dom.size(), "inner_region: distance field size mismatch");
  if (eps == 0.0) return dom;
  GridDomain out;
  out.dim = dom.dim;
  out.shape = dom.shape;
  out.offset = dom.offset;
  out.h = dom.h;
  out.generator = Generator::derived;
  out.params = dom.params;
  out.name = dom.name + " eps=" + detail::fmt_num(eps);
  out.mask.assign(dom.mask.size(), 0);
  std::size_t count = 0;
  for (std::size_t n = 0; n < dom.size(); ++n)
    if (dist.values[static_cast<Eigen::Index>(n)] > eps) {
      out.mask[dom.interior[n]] = 1;
      ++count;
    }
  detail::require(count > 0,
                  "inner_region: empty region for eps=" + detail::fmt_num(eps) + " (max d = " +
                      detail::fmt_num(dist.max()) + ")",
                  ErrorKind::domain);
  detail::finalize_domain(out, false);
  for (auto k : out.boundary_nodes) {
    const Point p = out.position(k);
    out.boundary.segments.push_back({p, p});
  }
  return out;
}

/// Interior indices with d(x) < eps.
inline std::vector<std::size_t> strip_indices(const DistanceField& dist, double eps) {
  detail::require(eps > 0.0, "strip_indices: eps must be positive");
  std::vector<std::size_t> out;
  for (Eigen::Index n = 0; n < dist.values.size(); ++n)
    if (dist.values[n] < eps) out.push_back(static_cast<std::size_t>(n));
  return out;
}

/// Interior values lifted to the lattice; exterior nodes get `exterior`.
inline Eigen::VectorXd to_lattice(const GridDomain& dom, const Eigen::VectorXd& values, double exterior = 0.0) {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dom.lattice_size()), exterior);
  for (std::size_t n = 0; n < dom.size(); ++n) out[static_cast<Eigen::Index>(dom.interior[n])] = values[static_cast<Eigen::Index>(n)];
  return out;
}

/// Writes the mask in the same text format read_mask_file accepts (padding stripped).
inline std::string mask_to_text(const GridDomain& dom) {
  std::ostringstream os;
  os.precision(17);
  const int nx = dom.shape[0] - 2;
  const int ny = dom.dim == 2 ? dom.shape[1] - 2 : 1;
  os << dom.dim << ' ' << nx;
  if (dom.dim == 2) os << ' ' << ny;
  os << ' ' << dom.h << '\n';
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) os << (dom.mask[dom.lattice_index(i + 1, dom.dim == 2 ? j + 1 : 0)] ? '1' : '0');
    os << '\n';
  }
  return os.str();
}

}  // namespace decaylab
