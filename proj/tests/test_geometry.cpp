#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "decaylab/geometry.hpp"

using namespace decaylab;

namespace {

GridDomain make(Generator g, std::vector<double> params, double h, std::size_t cap = 20000) {
  DomainSpec s{g, std::move(params), h, {}, cap};
  return build_domain(s);
}

std::size_t node_at(const GridDomain& dom, double x, double y = 0.0) {
  for (std::size_t n = 0; n < dom.size(); ++n) {
    const Point p = dom.interior_position(n);
    if (std::abs(p.x - x) < 1e-9 && std::abs(p.y - y) < 1e-9) return n;
  }
  ADD_FAILURE() << "no interior node at (" << x << "," << y << ")";
  return 0;
}

double seg_dist(Point p, Point a, Point b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / (vx * vx + vy * vy);
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - a.x - t * vx, p.y - a.y - t * vy);
}

}  // namespace

TEST(BuildDomain, IntervalQuarterSpacing) {
  const auto dom = make(Generator::interval, {1.0}, 0.25);
  ASSERT_EQ(dom.size(), 3u);
  EXPECT_EQ(dom.dim, 1);
  EXPECT_NEAR(dom.interior_position(0).x, 0.25, 1e-15);
  EXPECT_NEAR(dom.interior_position(1).x, 0.50, 1e-15);
  EXPECT_NEAR(dom.interior_position(2).x, 0.75, 1e-15);
}

TEST(BuildDomain, UnitSquareHalfSpacingHasOneNode) {
  const auto dom = make(Generator::rectangle, {1.0, 1.0}, 0.5);
  ASSERT_EQ(dom.size(), 1u);
  EXPECT_NEAR(dom.interior_position(0).x, 0.5, 1e-15);
  EXPECT_NEAR(dom.interior_position(0).y, 0.5, 1e-15);
}

TEST(BuildDomain, KochLevelTwoSegmentsAndNodeRange) {
  const auto dom = make(Generator::koch_prefractal, {2.0}, 1.0 / 72);
  // Each Koch step replaces a segment by four; a triangle has three sides.
  std::size_t per_side = 1;
  for (int k = 0; k < 2; ++k) per_side *= 4;
  EXPECT_EQ(dom.boundary.segments.size(), 3 * per_side);
  EXPECT_GE(dom.size(), 2000u);
  EXPECT_LE(dom.size(), 20000u);
}

TEST(BuildDomain, PaddingAndBoundaryNodes) {
  for (const auto& dom : {make(Generator::disk, {1.0}, 0.1), make(Generator::lshape, {2.0}, 0.1),
                          make(Generator::slit_square, {1.0, 0.5}, 1.0 / 16), make(Generator::interval, {1.0}, 0.1)}) {
    std::set<std::size_t> expected;
    for (auto k : dom.interior)
      for (int axis = 0; axis < dom.dim; ++axis)
        for (int dir : {-1, 1}) {
          const auto nb = dom.neighbor(k, axis, dir);
          ASSERT_GE(nb, 0) << dom.name << ": interior node on the lattice edge";
          if (!dom.mask[static_cast<std::size_t>(nb)]) expected.insert(static_cast<std::size_t>(nb));
        }
    std::set<std::size_t> got(dom.boundary_nodes.begin(), dom.boundary_nodes.end());
    EXPECT_EQ(got, expected) << dom.name;
  }
}

TEST(BuildDomain, InteriorIsConnected) {
  for (const auto& dom : {make(Generator::lshape, {2.0}, 0.1), make(Generator::slit_square, {1.0, 0.5}, 1.0 / 16),
                          make(Generator::koch_prefractal, {2.0}, 1.0 / 54)}) {
    std::vector<bool> seen(dom.lattice_size(), false);
    std::vector<std::size_t> stack{dom.interior.front()};
    seen[dom.interior.front()] = true;
    std::size_t reached = 0;
    while (!stack.empty()) {
      const auto k = stack.back();
      stack.pop_back();
      ++reached;
      for (int axis = 0; axis < dom.dim; ++axis)
        for (int dir : {-1, 1}) {
          const auto nb = static_cast<std::size_t>(dom.neighbor(k, axis, dir));
          if (dom.mask[nb] && !seen[nb]) seen[nb] = true, stack.push_back(nb);
        }
    }
    EXPECT_EQ(reached, dom.size()) << dom.name;
  }
}

TEST(BuildDomain, Deterministic) {
  const auto a = make(Generator::koch_prefractal, {2.0}, 1.0 / 54);
  const auto b = make(Generator::koch_prefractal, {2.0}, 1.0 / 54);
  EXPECT_EQ(a.mask, b.mask);
  EXPECT_EQ(a.name, b.name);
}

TEST(BuildDomain, Errors) {
  EXPECT_THROW(make(Generator::interval, {1.0}, 0.0), Error);
  EXPECT_THROW(make(Generator::interval, {-1.0}, 0.1), Error);
  EXPECT_THROW(make(Generator::rectangle, {1.0, 1.0}, 1.0 / 200, 20000), Error);  // node cap
  EXPECT_THROW(make(Generator::koch_prefractal, {5.0}, 0.001), Error);
  EXPECT_THROW(make(Generator::koch_prefractal, {2.0}, 0.1), Error);  // under-resolved segments
  EXPECT_THROW(make(Generator::rectangle, {1.0, 1.0}, 2.0), Error);    // empty interior
  DomainSpec missing{Generator::mask_file, {}, 0.0, "/nonexistent/mask.txt"};
  EXPECT_THROW(build_domain(missing), Error);
  EXPECT_THROW(generator_from_string("torus"), Error);
}

TEST(BuildDomain, MaskFileRoundTrip) {
  const auto dom = make(Generator::lshape, {2.0}, 0.1);
  const auto path = std::filesystem::temp_directory_path() / "decaylab_test_mask.txt";
  {
    std::ofstream out(path);
    out << mask_to_text(dom);
  }
  DomainSpec s{Generator::mask_file, {}, 0.0, path.string()};
  const auto back = build_domain(s);
  EXPECT_EQ(back.size(), dom.size());
  EXPECT_EQ(back.mask, dom.mask);
  std::filesystem::remove(path);
}

TEST(Distance, Examples) {
  const auto iv = make(Generator::interval, {1.0}, 0.1);
  const auto d = distance_to_boundary(iv);
  EXPECT_NEAR(d.values[static_cast<Eigen::Index>(node_at(iv, 0.3))], 0.3, 1e-12);

  const auto sq = make(Generator::rectangle, {1.0, 1.0}, 0.5);
  EXPECT_NEAR(distance_to_boundary(sq).values[0], 0.5, 1e-15);
}

TEST(Distance, LShapeReentrantCornerAgainstBruteForce) {
  const double h = 0.1;
  const auto dom = make(Generator::lshape, {2.0}, h);
  const auto d = distance_to_boundary(dom);
  const std::vector<Point> poly{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  for (std::size_t n = 0; n < dom.size(); ++n) {
    const Point p = dom.interior_position(n);
    double best = 1e300;
    for (std::size_t k = 0; k < poly.size(); ++k) best = std::min(best, seg_dist(p, poly[k], poly[(k + 1) % poly.size()]));
    ASSERT_NEAR(d.values[static_cast<Eigen::Index>(n)], best, 1e-12);
  }
  const auto corner = node_at(dom, 1.0 - h, 1.0 - h);
  EXPECT_NEAR(d.values[static_cast<Eigen::Index>(corner)], h * std::sqrt(2.0), 1e-12);
}

TEST(Distance, PositiveAndLipschitz) {
  for (const auto& dom : {make(Generator::disk, {1.0}, 0.05), make(Generator::slit_square, {1.0, 0.5}, 1.0 / 36),
                          make(Generator::koch_prefractal, {2.0}, 1.0 / 54)}) {
    const auto d = distance_to_boundary(dom);
    EXPECT_GT(d.min(), 0.0);
    for (std::size_t n = 0; n < dom.size(); ++n)
      for (int axis = 0; axis < dom.dim; ++axis) {
        const auto nb = static_cast<std::size_t>(dom.neighbor(dom.interior[n], axis, 1));
        const auto j = dom.interior_index[nb];
        if (j < 0) continue;
        ASSERT_LE(std::abs(d.values[static_cast<Eigen::Index>(n)] - d.values[j]), dom.h * std::sqrt(double(dom.dim)) + 1e-12);
      }
  }
}

TEST(Distance, ConcaveAlongLatticeLinesOnConvexDomains) {
  for (const auto& dom : {make(Generator::interval, {1.0}, 0.05), make(Generator::rectangle, {1.0, 0.7}, 0.05),
                          make(Generator::disk, {1.0}, 0.05)}) {
    const auto d = distance_to_boundary(dom);
    for (std::size_t n = 0; n < dom.size(); ++n)
      for (int axis = 0; axis < dom.dim; ++axis) {
        const auto a = dom.interior_index[static_cast<std::size_t>(dom.neighbor(dom.interior[n], axis, -1))];
        const auto b = dom.interior_index[static_cast<std::size_t>(dom.neighbor(dom.interior[n], axis, 1))];
        if (a < 0 || b < 0) continue;
        ASSERT_GE(d.values[static_cast<Eigen::Index>(n)], 0.5 * (d.values[a] + d.values[b]) - 1e-12) << dom.name;
      }
  }
}

TEST(InnerRegion, Examples) {
  const auto iv = make(Generator::interval, {1.0}, 0.1);
  const auto d = distance_to_boundary(iv);
  EXPECT_EQ(inner_region(iv, d, 0.0).mask, iv.mask);

  const auto sub = inner_region(iv, d, 0.25);
  ASSERT_EQ(sub.size(), 5u);
  for (std::size_t n = 0; n < 5; ++n) EXPECT_NEAR(sub.interior_position(n).x, 0.3 + 0.1 * double(n), 1e-12);
  EXPECT_NE(sub.name.find("eps=0.25"), std::string::npos);

  const auto sq = make(Generator::rectangle, {1.0, 1.0}, 0.1);
  try {
    inner_region(sq, distance_to_boundary(sq), 0.6);
    FAIL() << "expected an empty-region error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
}

TEST(StripIndices, Examples) {
  const auto iv = make(Generator::interval, {1.0}, 0.1);
  const auto d = distance_to_boundary(iv);
  const auto strip = strip_indices(d, 0.25);
  std::vector<std::size_t> expected{node_at(iv, 0.1), node_at(iv, 0.2), node_at(iv, 0.8), node_at(iv, 0.9)};
  EXPECT_EQ(strip, expected);
  EXPECT_EQ(strip_indices(d, 10.0).size(), iv.size());
  EXPECT_TRUE(strip_indices(d, d.min()).empty());
  EXPECT_THROW(strip_indices(d, 0.0), Error);
}

TEST(StripIndices, PartitionWithInnerRegion) {
  const auto dom = make(Generator::koch_prefractal, {2.0}, 1.0 / 54);
  const auto d = distance_to_boundary(dom);
  for (double eps : {0.01, 0.037, 0.05, 0.1}) {
    const auto strip = strip_indices(d, eps);
    const auto inner = inner_region(dom, d, eps);
    std::set<std::size_t> lattice;
    for (auto n : strip) lattice.insert(dom.interior[n]);
    for (auto k : inner.interior) EXPECT_TRUE(lattice.insert(k).second) << "node counted twice";
    EXPECT_EQ(lattice.size(), dom.size());
  }
}

TEST(Distance, MonotoneUnderShrinking) {
  const auto dom = make(Generator::lshape, {2.0}, 0.05);
  const auto d = distance_to_boundary(dom);
  const auto sub = inner_region(dom, d, 3 * dom.h);
  const auto ds = distance_to_boundary(sub);
  for (std::size_t n = 0; n < sub.size(); ++n) {
    const auto parent = dom.interior_index[sub.interior[n]];
    ASSERT_GE(parent, 0);
    EXPECT_LE(ds.values[static_cast<Eigen::Index>(n)], d.values[parent] + 1e-12);
  }
}
