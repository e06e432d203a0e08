#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "projections.hpp"

namespace tpmhd {
namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const Mesh> mesh_of(std::size_t n, bool periodic = false) {
  return std::make_shared<const Mesh>(Mesh::structured(n, periodic));
}

double cos2(double s) { return std::cos(kPi * s) * std::cos(kPi * s); }

double phi0(Point2 p) { return cos2(p.x) * cos2(p.y); }
Vec2 grad_phi0(Point2 p) {
  return {-kPi * std::sin(2 * kPi * p.x) * cos2(p.y), -kPi * cos2(p.x) * std::sin(2 * kPi * p.y)};
}

Vec2 b0(Point2 p) {
  return {std::sin(kPi * p.x) * std::cos(kPi * p.y), -std::sin(kPi * p.y) * std::cos(kPi * p.x)};
}
Mat2 grad_b0(Point2 p) {
  const double sx = std::sin(kPi * p.x), cx = std::cos(kPi * p.x);
  const double sy = std::sin(kPi * p.y), cy = std::cos(kPi * p.y);
  return {kPi * cx * cy, -kPi * sx * sy, kPi * sx * sy, -kPi * cx * cy};
}

Vec2 u0(Point2 p) {
  const double sx = std::sin(kPi * p.x), sy = std::sin(kPi * p.y);
  return {kPi * std::sin(2 * kPi * p.y) * sx * sx, -kPi * std::sin(2 * kPi * p.x) * sy * sy};
}

double rate(double ec, double ef) { return std::log2(ec / ef); }

TEST(Ritz, ReproducesSpaceMembers) {
  const FeSpace s = make_space(mesh_of(6), ElementFamily::P1);
  const auto lin = ritz_projection(s, [](Point2 p) { return p.x + 2 * p.y; }, [](Point2) { return Vec2{1, 2}; });
  for (std::size_t d = 0; d < s.n_dofs(); ++d) {
    const Point2 p = s.dof_point(d);
    EXPECT_NEAR(lin[d], p.x + 2 * p.y, 1e-12);
  }
  const auto c = ritz_projection(s, [](Point2) { return -0.3; }, [](Point2) { return Vec2{}; });
  for (double v : c) EXPECT_NEAR(v, -0.3, 1e-12);

  const auto coeffs = interpolate(s, ScalarFn(phi0));
  const auto again = ritz_projection(s, coeffs);
  for (std::size_t d = 0; d < s.n_dofs(); ++d) EXPECT_NEAR(again[d], coeffs[d], 1e-11);
}

TEST(Ritz, PreservesMean) {
  const FeSpace s = make_space(mesh_of(8), ElementFamily::P1);
  const auto r = ritz_projection(s, phi0, grad_phi0);
  EXPECT_NEAR(total_mass(s, r), 0.25, 1e-10);  // int cos^2 = 1/2 per direction
}

TEST(Ritz, ConvergenceOrders) {
  std::vector<double> l2, h1;
  for (std::size_t n : {8u, 16u, 32u}) {
    const FeSpace s = make_space(mesh_of(n), ElementFamily::P1);
    const auto r = ritz_projection(s, phi0, grad_phi0);
    l2.push_back(l2_error(s, r, phi0));
    h1.push_back(h1semi_error(s, r, grad_phi0));
  }
  EXPECT_NEAR(rate(l2[1], l2[2]), 2.0, 0.3);
  EXPECT_NEAR(rate(h1[1], h1[2]), 1.0, 0.3);
}

TEST(L2Projection, ZeroAndIdempotent) {
  const auto m = mesh_of(5);
  const FeSpace s = make_space(m, ElementFamily::P1);
  for (double v : l2_projection(s, [](Point2) { return 0.0; })) EXPECT_EQ(v, 0.0);

  for (ElementFamily f : {ElementFamily::P1Bubble, ElementFamily::P2}) {
    const FeSpace v = make_space(m, f, 2);
    const VectorFn g = [](Point2 p) { return Vec2{1.0 - 2 * p.x + p.y, 0.5 * p.x + 3 * p.y}; };
    const auto proj = l2_projection(v, g);
    EXPECT_LE(l2_error_vector(v, proj, g), 1e-11) << to_string(f);
  }
  // Projection of a discrete field, evaluated cellwise, reproduces it.
  const FeSpace p2 = make_space(m, ElementFamily::P2);
  const auto coeffs = interpolate(p2, ScalarFn(phi0));
  const auto field = [&](Point2 p) {
    for (std::size_t c = 0; c < m->num_cells(); ++c) {
      const CellGeometry g = cell_geometry(*m, c);
      const double det = g.det;
      const Point2 d = p - g.origin;
      const double a = (g.jacobian.yy * d.x - g.jacobian.xy * d.y) / det;
      const double b = (-g.jacobian.yx * d.x + g.jacobian.xx * d.y) / det;
      if (a >= -1e-12 && b >= -1e-12 && a + b <= 1 + 1e-12) return eval_scalar(p2, coeffs, c, {1 - a - b, a, b});
    }
    return 0.0;
  };
  const auto proj = l2_projection(p2, field);
  double worst = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) worst = std::max(worst, std::abs(proj[k] - coeffs[k]));
  EXPECT_LE(worst, 1e-11);
}

TEST(L2Projection, BubbleVelocityOrder) {
  std::vector<double> e;
  for (std::size_t n : {8u, 16u, 32u}) {
    const FeSpace v = make_space(mesh_of(n), ElementFamily::P1Bubble, 2);
    e.push_back(l2_error_vector(v, l2_projection(v, u0), u0));
  }
  EXPECT_NEAR(rate(e[1], e[2]), 2.0, 0.3);
}

TEST(L2Projection, RespectsConstraints) {
  const FeSpace v = make_space(mesh_of(4), ElementFamily::P2, 2);
  EssentialConstraints bc;
  for (BoundaryTag t : kAllBoundaryTags) {
    constrain_boundary(bc, v, t, 0, [](Point2) { return 0.0; });
    constrain_boundary(bc, v, t, 1, [](Point2) { return 0.0; });
  }
  const auto proj = l2_projection(v, u0, bc);
  for (std::size_t d : bc.dofs()) EXPECT_EQ(proj[d], 0.0);
}

TEST(Maxwell, ReproducesSpaceMembers) {
  const auto m = mesh_of(4);
  const FeSpace v = make_space(m, ElementFamily::P2, 2);
  const VectorFn f = [](Point2 p) { return Vec2{p.x * p.x - p.y, p.x * p.y + 2 * p.y * p.y}; };
  const TensorFn g = [](Point2 p) { return Mat2{2 * p.x, -1.0, p.y, p.x + 4 * p.y}; };
  const auto proj = maxwell_projection(v, f, g);
  EXPECT_LE(l2_error_vector(v, proj, f), 1e-11);

  const FeSpace p1 = make_space(m, ElementFamily::P1, 2);
  const auto one = maxwell_projection(p1, [](Point2) { return Vec2{1.0, 0.0}; }, [](Point2) { return Mat2{}; });
  EXPECT_LE(l2_error_vector(p1, one, [](Point2) { return Vec2{1.0, 0.0}; }), 1e-12);
}

TEST(Maxwell, TangentialTraceImposed) {
  const FeSpace v = make_space(mesh_of(4), ElementFamily::P2, 2);
  const EssentialConstraints bc = tangential_constraints(v, b0);
  const auto proj = maxwell_projection(v, b0, grad_b0);
  const auto dofs = bc.dofs();
  const auto vals = bc.values();
  for (std::size_t k = 0; k < dofs.size(); ++k) EXPECT_EQ(proj[dofs[k]], vals[k]);
  // Corners carry both components.
  const std::size_t corner = 0;
  EXPECT_TRUE(bc.contains(v.global_dof(corner, 0)));
  EXPECT_TRUE(bc.contains(v.global_dof(corner, 1)));
}

TEST(Maxwell, P2Order) {
  std::vector<double> e;
  for (std::size_t n : {8u, 16u, 32u}) {
    const FeSpace v = make_space(mesh_of(n), ElementFamily::P2, 2);
    e.push_back(l2_error_vector(v, maxwell_projection(v, b0, grad_b0), b0));
  }
  EXPECT_NEAR(rate(e[0], e[1]), 3.0, 0.4);
  EXPECT_NEAR(rate(e[1], e[2]), 3.0, 0.4);
}

TEST(Maxwell, PeriodicWithFullDirichletSides) {
  const auto m = mesh_of(8, true);
  const FeSpace v = make_space(m, ElementFamily::P1, 2);
  EssentialConstraints bc;
  for (BoundaryTag t : {BoundaryTag::Bottom, BoundaryTag::Top}) {
    constrain_boundary(bc, v, t, 0, [](Point2) { return 1.0; });
    constrain_boundary(bc, v, t, 1, [](Point2) { return 0.0; });
  }
  const auto proj = maxwell_projection(v, [](Point2) { return Mat2{}; }, bc);
  EXPECT_LE(l2_error_vector(v, proj, [](Point2) { return Vec2{1.0, 0.0}; }), 1e-12);
}

TEST(Constraints, RowReplacementNeedsDiagonal) {
  std::vector<Triplet> t = {{0, 1, 1.0}, {1, 1, 1.0}};
  CsrMatrix a = triplet_to_csr(2, 2, t);
  std::vector<double> b(2, 0.0);
  EssentialConstraints bc;
  bc.add(0, 1.0);
  EXPECT_THROW(bc.apply(a, b), InvalidArgument);
}

}  // namespace
}  // namespace tpmhd
