#include "fespace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace tpmhd {

const char* to_string(ElementFamily family) {
  switch (family) {
    case ElementFamily::P1: return "P1";
    case ElementFamily::P2: return "P2";
    case ElementFamily::P1Bubble: return "P1b";
  }
  return "?";
}

std::size_t local_dof_count(ElementFamily family) {
  switch (family) {
    case ElementFamily::P1: return 3;
    case ElementFamily::P2: return 6;
    case ElementFamily::P1Bubble: return 4;
  }
  return 0;
}

int complete_degree(ElementFamily family) { return family == ElementFamily::P2 ? 2 : 1; }

namespace {

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre01(unsigned n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (unsigned i = 0; i < n; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double p = std::legendre(n, t);
      const double pm = n > 1 ? std::legendre(n - 1, t) : 1.0;
      dp = n * (t * p - pm) / (t * t - 1.0);
      const double step = p / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double p = std::legendre(n, t);
    const double pm = n > 1 ? std::legendre(n - 1, t) : 1.0;
    dp = n * (t * p - pm) / (t * t - 1.0);
    x[i] = 0.5 * (t + 1.0);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

// Collapsed (Duffy) tensor rule: xi = s, eta = (1 - s) t.
QuadratureRule build_rule(int degree) {
  const unsigned m = static_cast<unsigned>((degree + 3) / 2);
  std::vector<double> xs, ws;
  gauss_legendre01(m, xs, ws);
  QuadratureRule rule;
  rule.degree = degree;
  for (unsigned a = 0; a < m; ++a) {
    for (unsigned b = 0; b < m; ++b) {
      const double xi = xs[a];
      const double eta = (1.0 - xs[a]) * xs[b];
      rule.points.push_back({1.0 - xi - eta, xi, eta});
      rule.weights.push_back(ws[a] * ws[b] * (1.0 - xs[a]));
    }
  }
  return rule;
}

}  // namespace

const QuadratureRule& quadrature_rule(int degree) {
  static const std::vector<QuadratureRule> rules = [] {
    std::vector<QuadratureRule> r;
    for (int d = 1; d <= 10; ++d) r.push_back(build_rule(d));
    return r;
  }();
  TPMHD_REQUIRE(degree >= 1 && degree <= 10, InvalidArgument,
                "unsupported quadrature degree " + std::to_string(degree));
  return rules[static_cast<std::size_t>(degree - 1)];
}

BasisValues eval_basis(ElementFamily family, const std::array<double, 3>& l) {
  static constexpr std::array<Vec2, 3> dl = {Vec2{-1.0, -1.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};
  BasisValues b;
  b.count = local_dof_count(family);
  switch (family) {
    case ElementFamily::P1:
      for (std::size_t i = 0; i < 3; ++i) {
        b.values[i] = l[i];
        b.ref_grads[i] = dl[i];
      }
      break;
    case ElementFamily::P2:
      for (std::size_t i = 0; i < 3; ++i) {
        b.values[i] = l[i] * (2.0 * l[i] - 1.0);
        b.ref_grads[i] = (4.0 * l[i] - 1.0) * dl[i];
        const std::size_t j = (i + 1) % 3, k = (i + 2) % 3;
        b.values[3 + i] = 4.0 * l[j] * l[k];
        b.ref_grads[3 + i] = 4.0 * l[k] * dl[j] + 4.0 * l[j] * dl[k];
      }
      break;
    case ElementFamily::P1Bubble:
      for (std::size_t i = 0; i < 3; ++i) {
        b.values[i] = l[i];
        b.ref_grads[i] = dl[i];
      }
      b.values[3] = 27.0 * l[0] * l[1] * l[2];
      b.ref_grads[3] = 27.0 * (l[1] * l[2]) * dl[0] + 27.0 * (l[0] * l[2]) * dl[1] +
                       27.0 * (l[0] * l[1]) * dl[2];
      break;
  }
  return b;
}

Point2 CellGeometry::map(const std::array<double, 3>& bary) const {
  const double xi = bary[1], eta = bary[2];
  return {origin.x + jacobian.xx * xi + jacobian.xy * eta,
          origin.y + jacobian.yx * xi + jacobian.yy * eta};
}

CellGeometry cell_geometry(const Mesh& mesh, std::size_t cell) {
  const auto& c = mesh.cell(cell);
  const auto v = mesh.vertices();
  CellGeometry g;
  g.origin = v[c[0]];
  g.jacobian = {v[c[1]].x - v[c[0]].x, v[c[2]].x - v[c[0]].x,
                v[c[1]].y - v[c[0]].y, v[c[2]].y - v[c[0]].y};
  g.det = g.jacobian.xx * g.jacobian.yy - g.jacobian.xy * g.jacobian.yx;
  const double inv = 1.0 / g.det;
  // (J^{-1})^T
  g.inverse_transpose = {g.jacobian.yy * inv, -g.jacobian.yx * inv,
                         -g.jacobian.xy * inv, g.jacobian.xx * inv};
  return g;
}

BasisTable tabulate(ElementFamily family, const QuadratureRule& rule) {
  BasisTable t{family, local_dof_count(family), rule.size(), {}, {}};
  t.values.resize(t.n_local * t.n_points);
  t.ref_grads.resize(t.n_local * t.n_points);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const BasisValues b = eval_basis(family, rule.points[q]);
    for (std::size_t i = 0; i < t.n_local; ++i) {
      t.values[q * t.n_local + i] = b.values[i];
      t.ref_grads[q * t.n_local + i] = b.ref_grads[i];
    }
  }
  return t;
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, ElementFamily family, std::size_t components,
                 SpaceConstraint constraint)
    : mesh_(std::move(mesh)),
      family_(family),
      components_(components),
      constraint_(constraint),
      n_local_(local_dof_count(family)) {
  TPMHD_REQUIRE(mesh_ != nullptr, InvalidArgument, "space needs a mesh");
  TPMHD_REQUIRE(components_ == 1 || components_ == 2, InvalidArgument,
                "space must have 1 or 2 components");
  const Mesh& m = *mesh_;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::vector<std::size_t> vertex_master(m.num_vertices());
  for (std::size_t v = 0; v < vertex_master.size(); ++v) vertex_master[v] = v;
  for (const auto& p : m.periodic_vertex_pairs()) vertex_master[p.right] = p.left;
  std::vector<std::size_t> edge_master(m.num_edges());
  for (std::size_t e = 0; e < edge_master.size(); ++e) edge_master[e] = e;
  for (const auto& p : m.periodic_edge_pairs()) edge_master[p.right] = p.left;

  std::vector<std::size_t> vertex_dof(m.num_vertices(), kNone);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    if (vertex_master[v] != v) continue;
    vertex_dof[v] = n_scalar_++;
    dof_points_.push_back(m.vertices()[v]);
    bubble_.push_back(false);
  }
  for (std::size_t v = 0; v < m.num_vertices(); ++v) vertex_dof[v] = vertex_dof[vertex_master[v]];

  std::vector<std::size_t> edge_dof(m.num_edges(), kNone);
  if (family_ == ElementFamily::P2) {
    for (std::size_t e = 0; e < m.num_edges(); ++e) {
      if (edge_master[e] != e) continue;
      edge_dof[e] = n_scalar_++;
      const auto& ed = m.edges()[e];
      dof_points_.push_back(0.5 * (m.vertices()[ed[0]] + m.vertices()[ed[1]]));
      bubble_.push_back(false);
    }
    for (std::size_t e = 0; e < m.num_edges(); ++e) edge_dof[e] = edge_dof[edge_master[e]];
  }

  cell_dofs_.resize(m.num_cells() * n_local_);
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    std::size_t* d = cell_dofs_.data() + c * n_local_;
    for (std::size_t i = 0; i < 3; ++i) d[i] = vertex_dof[m.cell(c)[i]];
    if (family_ == ElementFamily::P2) {
      for (std::size_t i = 0; i < 3; ++i) d[3 + i] = edge_dof[m.cell_edges(c)[i]];
    } else if (family_ == ElementFamily::P1Bubble) {
      d[3] = n_scalar_++;
      dof_points_.push_back(m.centroid(c));
      bubble_.push_back(true);
    }
  }

  for (auto& per_tag : boundary_) per_tag.assign(components_, {});
  for (const auto& be : m.boundary_edges()) {
    if (m.periodic_x() && (be.tag == BoundaryTag::Left || be.tag == BoundaryTag::Right)) continue;
    const auto& ed = m.edges()[be.edge];
    std::vector<std::size_t> scalar = {vertex_dof[ed[0]], vertex_dof[ed[1]]};
    if (family_ == ElementFamily::P2) scalar.push_back(edge_dof[be.edge]);
    for (std::size_t comp = 0; comp < components_; ++comp) {
      auto& list = boundary_[static_cast<std::size_t>(be.tag)][comp];
      for (std::size_t s : scalar) list.push_back(global_dof(s, comp));
    }
  }
  for (auto& per_tag : boundary_) {
    for (auto& list : per_tag) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }
}

const std::vector<std::size_t>& FeSpace::boundary_dofs(BoundaryTag tag,
                                                       std::size_t component) const {
  TPMHD_REQUIRE(component < components_, InvalidArgument, "component out of range");
  return boundary_[static_cast<std::size_t>(tag)][component];
}

FeSpace make_space(std::shared_ptr<const Mesh> mesh, ElementFamily family, std::size_t components,
                   SpaceConstraint constraint) {
  return FeSpace(std::move(mesh), family, components, constraint);
}

std::vector<double> interpolate(const FeSpace& space, const ScalarFn& f) {
  TPMHD_REQUIRE(space.components() == 1, InvalidArgument, "scalar interpolation on vector space");
  std::vector<double> out(space.n_dofs(), 0.0);
  for (std::size_t s = 0; s < space.scalar_dofs(); ++s) {
    if (!space.is_bubble(s)) out[s] = f(space.dof_point(s));
  }
  return out;
}

std::vector<double> interpolate(const FeSpace& space, const VectorFn& f) {
  TPMHD_REQUIRE(space.components() == 2, InvalidArgument, "vector interpolation on scalar space");
  std::vector<double> out(space.n_dofs(), 0.0);
  for (std::size_t s = 0; s < space.scalar_dofs(); ++s) {
    if (space.is_bubble(s)) continue;
    const Vec2 v = f(space.dof_point(s));
    out[space.global_dof(s, 0)] = v.x;
    out[space.global_dof(s, 1)] = v.y;
  }
  return out;
}

double eval_scalar(const FeSpace& space, std::span<const double> coeffs, std::size_t cell,
                   const std::array<double, 3>& bary) {
  const BasisValues b = eval_basis(space.family(), bary);
  const auto dofs = space.cell_dofs(cell);
  double v = 0.0;
  for (std::size_t i = 0; i < b.count; ++i) v += coeffs[dofs[i]] * b.values[i];
  return v;
}

Vec2 eval_vector(const FeSpace& space, std::span<const double> coeffs, std::size_t cell,
                 const std::array<double, 3>& bary) {
  const BasisValues b = eval_basis(space.family(), bary);
  const auto dofs = space.cell_dofs(cell);
  Vec2 v;
  for (std::size_t i = 0; i < b.count; ++i) {
    v.x += coeffs[space.global_dof(dofs[i], 0)] * b.values[i];
    v.y += coeffs[space.global_dof(dofs[i], 1)] * b.values[i];
  }
  return v;
}

Vec2 eval_scalar_gradient(const FeSpace& space, std::span<const double> coeffs, std::size_t cell,
                          const std::array<double, 3>& bary) {
  const BasisValues b = eval_basis(space.family(), bary);
  const CellGeometry g = cell_geometry(space.mesh(), cell);
  const auto dofs = space.cell_dofs(cell);
  Vec2 ref;
  for (std::size_t i = 0; i < b.count; ++i) ref = ref + coeffs[dofs[i]] * b.ref_grads[i];
  return g.physical_gradient(ref);
}

Mat2 eval_vector_gradient(const FeSpace& space, std::span<const double> coeffs, std::size_t cell,
                          const std::array<double, 3>& bary) {
  const BasisValues b = eval_basis(space.family(), bary);
  const CellGeometry g = cell_geometry(space.mesh(), cell);
  const auto dofs = space.cell_dofs(cell);
  Vec2 r0, r1;
  for (std::size_t i = 0; i < b.count; ++i) {
    r0 = r0 + coeffs[space.global_dof(dofs[i], 0)] * b.ref_grads[i];
    r1 = r1 + coeffs[space.global_dof(dofs[i], 1)] * b.ref_grads[i];
  }
  const Vec2 g0 = g.physical_gradient(r0), g1 = g.physical_gradient(r1);
  return {g0.x, g0.y, g1.x, g1.y};
}

}  // namespace tpmhd
