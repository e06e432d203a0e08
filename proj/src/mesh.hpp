#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tpmhd {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

enum class BoundaryTag : std::uint8_t { Bottom = 0, Right = 1, Top = 2, Left = 3 };

inline constexpr std::array<BoundaryTag, 4> kAllBoundaryTags = {
    BoundaryTag::Bottom, BoundaryTag::Right, BoundaryTag::Top, BoundaryTag::Left};

const char* to_string(BoundaryTag tag);

struct BoundaryEdge {
  std::size_t edge = 0;
  BoundaryTag tag = BoundaryTag::Bottom;
};

// Identification of an entity on x = 0 (master) with its image on x = 1.
struct PeriodicPair {
  std::size_t left = 0;
  std::size_t right = 0;
};

using Cell = std::array<std::size_t, 3>;
using Edge = std::array<std::size_t, 2>;

// Uniform triangulation of the unit square. Immutable once built.
//
// Local edge i of a cell is the edge opposite local vertex i. Edge vertex
// pairs are stored sorted (smaller global index first).
class Mesh {
 public:
  static Mesh structured(std::size_t n, bool periodic_x = false);

  std::size_t cells_per_side() const { return n_; }
  bool periodic_x() const { return periodic_x_; }

  std::span<const Point2> vertices() const { return vertices_; }
  std::span<const Cell> cells() const { return cells_; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const BoundaryEdge> boundary_edges() const { return boundary_edges_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const Cell& cell(std::size_t c) const { return cells_[c]; }
  const std::array<std::size_t, 3>& cell_edges(std::size_t c) const { return cell_edges_[c]; }
  // Cells adjacent to an edge; the second entry is empty on the boundary.
  const std::array<std::optional<std::size_t>, 2>& edge_cells(std::size_t e) const {
    return edge_cells_[e];
  }

  std::span<const PeriodicPair> periodic_vertex_pairs() const { return periodic_vertices_; }
  std::span<const PeriodicPair> periodic_edge_pairs() const { return periodic_edges_; }

  // Twice the signed area of cell c.
  double signed_area2(std::size_t c) const;
  double cell_area(std::size_t c) const { return 0.5 * signed_area2(c); }
  double cell_diameter(std::size_t c) const;
  Point2 centroid(std::size_t c) const;

 private:
  Mesh() = default;

  std::size_t n_ = 0;
  bool periodic_x_ = false;
  std::vector<Point2> vertices_;
  std::vector<Cell> cells_;
  std::vector<Edge> edges_;
  std::vector<std::array<std::size_t, 3>> cell_edges_;
  std::vector<std::array<std::optional<std::size_t>, 2>> edge_cells_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<PeriodicPair> periodic_vertices_;
  std::vector<PeriodicPair> periodic_edges_;
};

// Maximum cell diameter.
double mesh_size(const Mesh& mesh);

}  // namespace tpmhd
