#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "errors.hpp"
#include "mesh.hpp"

namespace tpmhd {
namespace {

std::set<Edge> enumerate_edges(const Mesh& m) {
  std::set<Edge> edges;
  for (const Cell& c : m.cells()) {
    for (int i = 0; i < 3; ++i) {
      std::size_t a = c[i], b = c[(i + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.insert({a, b});
    }
  }
  return edges;
}

TEST(Mesh, SingleSquareCounts) {
  const Mesh m = Mesh::structured(1);
  EXPECT_EQ(m.num_vertices(), 4u);
  EXPECT_EQ(m.num_cells(), 2u);
  EXPECT_EQ(m.num_edges(), 5u);
  EXPECT_EQ(m.boundary_edges().size(), 4u);
}

TEST(Mesh, VertexAndCellCounts) {
  const Mesh m = Mesh::structured(8);
  EXPECT_EQ(m.num_vertices(), 81u);
  EXPECT_EQ(m.num_cells(), 128u);
}

TEST(Mesh, EulerRelationAgainstBruteForceEdges) {
  const Mesh m = Mesh::structured(4);
  const auto edges = enumerate_edges(m);
  EXPECT_EQ(edges.size(), 56u);
  EXPECT_EQ(m.num_edges(), edges.size());
  const long euler = static_cast<long>(m.num_vertices()) - static_cast<long>(edges.size()) +
                     static_cast<long>(m.num_cells());
  EXPECT_EQ(euler, 1);
}

TEST(Mesh, RejectsZeroCells) { EXPECT_THROW(Mesh::structured(0), InvalidArgument); }

TEST(Mesh, MeshSize) {
  EXPECT_NEAR(mesh_size(Mesh::structured(1)), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(mesh_size(Mesh::structured(8)), std::sqrt(2.0) / 8.0, 1e-15);

  const Mesh m = Mesh::structured(4);
  double brute = 0.0;
  for (const Cell& c : m.cells()) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const Point2 d = m.vertices()[c[i]] - m.vertices()[c[j]];
        brute = std::max(brute, std::sqrt(d.x * d.x + d.y * d.y));
      }
    }
  }
  EXPECT_DOUBLE_EQ(mesh_size(m), brute);
}

class MeshInvariants : public ::testing::TestWithParam<std::size_t> {};

TEST_P(MeshInvariants, Hold) {
  const std::size_t n = GetParam();
  const Mesh m = Mesh::structured(n);
  double area = 0.0;
  std::vector<int> used(m.num_vertices(), 0);
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    EXPECT_GT(m.signed_area2(c), 0.0);
    area += m.cell_area(c);
    for (std::size_t v : m.cell(c)) {
      ASSERT_LT(v, m.num_vertices());
      used[v] = 1;
    }
  }
  EXPECT_NEAR(area, 1.0, 1e-16 * static_cast<double>(m.num_cells()));
  for (int u : used) EXPECT_EQ(u, 1);

  std::size_t boundary = 0;
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const auto& adj = m.edge_cells(e);
    ASSERT_TRUE(adj[0].has_value());
    if (!adj[1]) ++boundary;
  }
  EXPECT_EQ(boundary, m.boundary_edges().size());
  EXPECT_EQ(boundary, 4 * n);

  // Local edge i is opposite local vertex i.
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (std::size_t i = 0; i < 3; ++i) {
      const Edge& e = m.edges()[m.cell_edges(c)[i]];
      EXPECT_NE(e[0], m.cell(c)[i]);
      EXPECT_NE(e[1], m.cell(c)[i]);
    }
  }

  for (const auto& be : m.boundary_edges()) {
    const Point2 a = m.vertices()[m.edges()[be.edge][0]];
    const Point2 b = m.vertices()[m.edges()[be.edge][1]];
    switch (be.tag) {
      case BoundaryTag::Bottom: EXPECT_TRUE(a.y == 0.0 && b.y == 0.0); break;
      case BoundaryTag::Top: EXPECT_TRUE(a.y == 1.0 && b.y == 1.0); break;
      case BoundaryTag::Left: EXPECT_TRUE(a.x == 0.0 && b.x == 0.0); break;
      case BoundaryTag::Right: EXPECT_TRUE(a.x == 1.0 && b.x == 1.0); break;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, MeshInvariants, ::testing::Values(1u, 2u, 3u, 8u, 17u));

TEST(Mesh, PeriodicPairing) {
  const Mesh m = Mesh::structured(6, true);
  ASSERT_EQ(m.periodic_vertex_pairs().size(), 7u);
  ASSERT_EQ(m.periodic_edge_pairs().size(), 6u);

  std::map<std::size_t, std::size_t> pair;
  for (const auto& p : m.periodic_vertex_pairs()) {
    const Point2 l = m.vertices()[p.left], r = m.vertices()[p.right];
    EXPECT_EQ(l.y, r.y);
    EXPECT_EQ(l.x, 0.0);
    EXPECT_EQ(r.x, 1.0);
    pair[p.left] = p.right;
    pair[p.right] = p.left;
  }
  for (const auto& [a, b] : pair) EXPECT_EQ(pair.at(b), a);

  for (const auto& p : m.periodic_edge_pairs()) {
    const Edge& l = m.edges()[p.left];
    const Edge& r = m.edges()[p.right];
    EXPECT_EQ(m.vertices()[l[0]].y, m.vertices()[r[0]].y);
    EXPECT_EQ(m.vertices()[l[1]].y, m.vertices()[r[1]].y);
  }
}

}  // namespace
}  // namespace tpmhd
