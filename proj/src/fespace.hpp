#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "mesh.hpp"

namespace tpmhd {

using Vec2 = Point2;

// Gradient of a 2-vector field: entry (i, j) = d u_i / d x_j.
struct Mat2 {
  double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;
};

using ScalarFn = std::function<double(Point2)>;
using GradientFn = std::function<Vec2(Point2)>;
using VectorFn = std::function<Vec2(Point2)>;
using TensorFn = std::function<Mat2(Point2)>;

enum class ElementFamily { P1, P2, P1Bubble };

const char* to_string(ElementFamily family);
std::size_t local_dof_count(ElementFamily family);

// Highest total degree d such that every polynomial of degree <= d lies in the family.
int complete_degree(ElementFamily family);

// Barycentric points on the reference triangle (0,0), (1,0), (0,1).
struct QuadratureRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;  // sum to 1/2

  std::size_t size() const { return weights.size(); }
};

// Rule exact for bivariate polynomials of total degree <= degree, 1 <= degree <= 10.
const QuadratureRule& quadrature_rule(int degree);

// Degree used for all assembly and error integration.
inline constexpr int kAssemblyQuadratureDegree = 8;

inline constexpr std::size_t kMaxLocalDofs = 6;

struct BasisValues {
  std::size_t count = 0;
  std::array<double, kMaxLocalDofs> values{};
  std::array<Vec2, kMaxLocalDofs> ref_grads{};  // d/d(xi, eta)
};

// Local shape functions. P2 ordering: three vertices, then the three edges
// opposite vertices 0, 1, 2. P1Bubble: three vertices, then 27*l0*l1*l2.
BasisValues eval_basis(ElementFamily family, const std::array<double, 3>& bary);

// Affine map of a cell: x = x0 + J * (xi, eta).
struct CellGeometry {
  Point2 origin;
  Mat2 jacobian;
  Mat2 inverse_transpose;
  double det = 0.0;

  Point2 map(const std::array<double, 3>& bary) const;
  Vec2 physical_gradient(Vec2 ref) const {
    return {inverse_transpose.xx * ref.x + inverse_transpose.xy * ref.y,
            inverse_transpose.yx * ref.x + inverse_transpose.yy * ref.y};
  }
};

CellGeometry cell_geometry(const Mesh& mesh, std::size_t cell);

// Basis values and reference gradients tabulated at the points of a rule.
struct BasisTable {
  ElementFamily family;
  std::size_t n_local = 0;
  std::size_t n_points = 0;
  std::vector<double> values;     // [q * n_local + i]
  std::vector<Vec2> ref_grads;    // [q * n_local + i]

  double value(std::size_t q, std::size_t i) const { return values[q * n_local + i]; }
  Vec2 ref_grad(std::size_t q, std::size_t i) const { return ref_grads[q * n_local + i]; }
};

BasisTable tabulate(ElementFamily family, const QuadratureRule& rule);

enum class SpaceConstraint { None, ZeroMean };

// Continuous Lagrange space (optionally bubble-enriched) with 1 or 2
// components. Vector DOFs are blocked by component: all x-component DOFs
// first, then all y-component DOFs. Periodic meshes merge the x = 1 DOFs
// into their x = 0 images.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, ElementFamily family, std::size_t components,
          SpaceConstraint constraint);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  ElementFamily family() const { return family_; }
  std::size_t components() const { return components_; }
  SpaceConstraint constraint() const { return constraint_; }

  std::size_t local_dofs() const { return n_local_; }
  std::size_t scalar_dofs() const { return n_scalar_; }
  std::size_t n_dofs() const { return n_scalar_ * components_; }

  // Component-0 DOF indices of the local shape functions of a cell.
  std::span<const std::size_t> cell_dofs(std::size_t cell) const {
    return {cell_dofs_.data() + cell * n_local_, n_local_};
  }
  std::size_t global_dof(std::size_t scalar_dof, std::size_t component) const {
    return component * n_scalar_ + scalar_dof;
  }

  // Global DOFs (including component offset) whose basis functions have a
  // nonzero trace on the tagged side. Empty for sides identified periodically.
  const std::vector<std::size_t>& boundary_dofs(BoundaryTag tag, std::size_t component) const;

  Point2 dof_point(std::size_t scalar_dof) const { return dof_points_[scalar_dof]; }
  bool is_bubble(std::size_t scalar_dof) const { return bubble_[scalar_dof]; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  ElementFamily family_;
  std::size_t components_;
  SpaceConstraint constraint_;
  std::size_t n_local_ = 0;
  std::size_t n_scalar_ = 0;
  std::vector<std::size_t> cell_dofs_;
  std::vector<Point2> dof_points_;
  std::vector<bool> bubble_;
  std::array<std::vector<std::vector<std::size_t>>, 4> boundary_;
};

FeSpace make_space(std::shared_ptr<const Mesh> mesh, ElementFamily family,
                   std::size_t components = 1,
                   SpaceConstraint constraint = SpaceConstraint::None);

// Nodal interpolants; bubble coefficients are zero.
std::vector<double> interpolate(const FeSpace& space, const ScalarFn& f);
std::vector<double> interpolate(const FeSpace& space, const VectorFn& f);

// Pointwise evaluation of a discrete field on one cell.
double eval_scalar(const FeSpace& space, std::span<const double> coeffs, std::size_t cell,
                   const std::array<double, 3>& bary);
Vec2 eval_vector(const FeSpace& space, std::span<const double> coeffs, std::size_t cell,
                 const std::array<double, 3>& bary);
Vec2 eval_scalar_gradient(const FeSpace& space, std::span<const double> coeffs,
                          std::size_t cell, const std::array<double, 3>& bary);
Mat2 eval_vector_gradient(const FeSpace& space, std::span<const double> coeffs,
                          std::size_t cell, const std::array<double, 3>& bary);

}  // namespace tpmhd
