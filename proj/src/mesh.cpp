#include "mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "errors.hpp"

namespace tpmhd {

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Bottom: return "bottom";
    case BoundaryTag::Right: return "right";
    case BoundaryTag::Top: return "top";
    case BoundaryTag::Left: return "left";
  }
  return "?";
}

Mesh Mesh::structured(std::size_t n, bool periodic_x) {
  TPMHD_REQUIRE(n >= 1, InvalidArgument, "structured mesh needs at least one cell per side");

  Mesh m;
  m.n_ = n;
  m.periodic_x_ = periodic_x;

  const std::size_t np = n + 1;
  const auto vid = [np](std::size_t i, std::size_t j) { return j * np + i; };
  const double h = 1.0 / static_cast<double>(n);

  m.vertices_.reserve(np * np);
  for (std::size_t j = 0; j < np; ++j) {
    for (std::size_t i = 0; i < np; ++i) {
      // Exact 0 and 1 on the boundary regardless of rounding in i*h.
      const double x = (i == n) ? 1.0 : static_cast<double>(i) * h;
      const double y = (j == n) ? 1.0 : static_cast<double>(j) * h;
      m.vertices_.push_back({x, y});
    }
  }

  // Each subsquare split along its bottom-left -> top-right diagonal.
  m.cells_.reserve(2 * n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t v00 = vid(i, j), v10 = vid(i + 1, j);
      const std::size_t v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
      m.cells_.push_back({v00, v10, v11});
      m.cells_.push_back({v00, v11, v01});
    }
  }

  std::map<Edge, std::size_t> edge_index;
  m.cell_edges_.resize(m.cells_.size());
  for (std::size_t c = 0; c < m.cells_.size(); ++c) {
    const Cell& cell = m.cells_[c];
    for (std::size_t le = 0; le < 3; ++le) {
      std::size_t a = cell[(le + 1) % 3], b = cell[(le + 2) % 3];
      if (a > b) std::swap(a, b);
      const Edge key{a, b};
      auto [it, inserted] = edge_index.try_emplace(key, m.edges_.size());
      if (inserted) {
        m.edges_.push_back(key);
        m.edge_cells_.push_back({c, std::nullopt});
      } else {
        m.edge_cells_[it->second][1] = c;
      }
      m.cell_edges_[c][le] = it->second;
    }
  }

  for (std::size_t e = 0; e < m.edges_.size(); ++e) {
    if (m.edge_cells_[e][1]) continue;
    const Point2 a = m.vertices_[m.edges_[e][0]];
    const Point2 b = m.vertices_[m.edges_[e][1]];
    BoundaryTag tag;
    if (a.y == 0.0 && b.y == 0.0) {
      tag = BoundaryTag::Bottom;
    } else if (a.x == 1.0 && b.x == 1.0) {
      tag = BoundaryTag::Right;
    } else if (a.y == 1.0 && b.y == 1.0) {
      tag = BoundaryTag::Top;
    } else {
      tag = BoundaryTag::Left;
    }
    m.boundary_edges_.push_back({e, tag});
  }

  if (periodic_x) {
    for (std::size_t j = 0; j < np; ++j) m.periodic_vertices_.push_back({vid(0, j), vid(n, j)});
    for (std::size_t j = 0; j < n; ++j) {
      Edge left{vid(0, j), vid(0, j + 1)};
      Edge right{vid(n, j), vid(n, j + 1)};
      m.periodic_edges_.push_back({edge_index.at(left), edge_index.at(right)});
    }
  }
  return m;
}

double Mesh::signed_area2(std::size_t c) const {
  const Point2 a = vertices_[cells_[c][0]];
  const Point2 b = vertices_[cells_[c][1]];
  const Point2 d = vertices_[cells_[c][2]];
  return (b.x - a.x) * (d.y - a.y) - (d.x - a.x) * (b.y - a.y);
}

double Mesh::cell_diameter(std::size_t c) const {
  double diam = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const Point2 d = vertices_[cells_[c][i]] - vertices_[cells_[c][(i + 1) % 3]];
    diam = std::max(diam, std::hypot(d.x, d.y));
  }
  return diam;
}

Point2 Mesh::centroid(std::size_t c) const {
  const Point2 s = vertices_[cells_[c][0]] + vertices_[cells_[c][1]] + vertices_[cells_[c][2]];
  return (1.0 / 3.0) * s;
}

double mesh_size(const Mesh& mesh) {
  double h = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) h = std::max(h, mesh.cell_diameter(c));
  return h;
}

}  // namespace tpmhd
