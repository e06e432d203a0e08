#include "projections.hpp"

#include "errors.hpp"
#include "forms.hpp"

namespace tpmhd {

void EssentialConstraints::merge(const EssentialConstraints& other, std::size_t offset) {
  for (const auto& [dof, value] : other.fixed_) add(dof + offset, value);
}

std::vector<std::size_t> EssentialConstraints::dofs() const {
  std::vector<std::size_t> out;
  out.reserve(fixed_.size());
  for (const auto& kv : fixed_) out.push_back(kv.first);
  return out;
}

std::vector<double> EssentialConstraints::values() const {
  std::vector<double> out;
  out.reserve(fixed_.size());
  for (const auto& kv : fixed_) out.push_back(kv.second);
  return out;
}

void EssentialConstraints::apply(CsrMatrix& a, std::span<double> rhs) const {
  replace_rows(a, rhs, dofs(), values());
}

std::size_t tangential_component(BoundaryTag tag) {
  return tag == BoundaryTag::Bottom || tag == BoundaryTag::Top ? 0 : 1;
}

void constrain_boundary(EssentialConstraints& out, const FeSpace& space, BoundaryTag tag, std::size_t comp,
                        const ScalarFn& value) {
  TPMHD_REQUIRE(comp < space.components(), InvalidArgument, "component out of range");
  for (std::size_t g : space.boundary_dofs(tag, comp)) out.add(g, value(space.dof_point(g % space.scalar_dofs())));
}

EssentialConstraints tangential_constraints(const FeSpace& space, const VectorFn& f) {
  TPMHD_REQUIRE(space.components() == 2, InvalidArgument, "tangential data needs a vector space");
  EssentialConstraints out;
  for (BoundaryTag tag : kAllBoundaryTags) {
    const std::size_t comp = tangential_component(tag);
    constrain_boundary(out, space, tag, comp, [&](Point2 p) { return comp == 0 ? f(p).x : f(p).y; });
  }
  return out;
}

namespace {

// [K m; m^T 0] [x; l] = [b; mean]
std::vector<double> solve_bordered(const FeSpace& space, const CsrMatrix& k, std::span<const double> b,
                                   double mean, double tol) {
  const std::size_t n = space.n_dofs();
  const auto m = assemble_source(space, TimeScalarFn([](Point2, double) { return 1.0; }), 0.0);
  std::vector<Triplet> t;
  t.reserve(k.nnz() + 2 * n + 1);
  append_block(t, k, 0, 0);
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, n, m[i]});
    t.push_back({n, i, m[i]});
  }
  t.push_back({n, n, 0.0});
  std::vector<double> rhs(b.begin(), b.end());
  rhs.push_back(mean);
  auto x = solve_linear(triplet_to_csr(n + 1, n + 1, t), rhs, tol);
  x.pop_back();
  return x;
}

void require_scalar(const FeSpace& space) {
  TPMHD_REQUIRE(space.components() == 1, InvalidArgument, "scalar space expected");
}

}  // namespace

std::vector<double> ritz_projection(const FeSpace& space, const ScalarFn& f, const GradientFn& grad, double tol) {
  require_scalar(space);
  const auto b = assemble_gradient_source(space, grad);
  const auto load = assemble_source(space, TimeScalarFn([&](Point2 p, double) { return f(p); }), 0.0);
  const auto one = interpolate(space, ScalarFn([](Point2) { return 1.0; }));
  double mean = 0.0;
  for (std::size_t i = 0; i < load.size(); ++i) mean += load[i] * one[i];
  return solve_bordered(space, assemble_stiffness(space).matrix, b, mean, tol);
}

std::vector<double> ritz_projection(const FeSpace& space, std::span<const double> coeffs, double tol) {
  require_scalar(space);
  TPMHD_REQUIRE(coeffs.size() == space.n_dofs(), InvalidArgument, "coefficient length mismatch");
  const CsrMatrix k = assemble_stiffness(space).matrix;
  const auto m = assemble_source(space, TimeScalarFn([](Point2, double) { return 1.0; }), 0.0);
  double mean = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) mean += m[i] * coeffs[i];
  return solve_bordered(space, k, k.multiply(coeffs), mean, tol);
}

std::vector<double> l2_projection(const FeSpace& space, const ScalarFn& f, double tol) {
  require_scalar(space);
  const auto b = assemble_source(space, TimeScalarFn([&](Point2 p, double) { return f(p); }), 0.0);
  return solve_linear(assemble_mass(space).matrix, b, tol);
}

std::vector<double> l2_projection(const FeSpace& space, const VectorFn& f, const EssentialConstraints& constraints,
                                  double tol) {
  TPMHD_REQUIRE(space.components() == 2, InvalidArgument, "vector space expected");
  auto b = assemble_source(space, TimeVectorFn([&](Point2 p, double) { return f(p); }), 0.0);
  CsrMatrix m = assemble_mass(space).matrix;
  constraints.apply(m, b);
  return solve_linear(m, b, tol);
}

std::vector<double> maxwell_projection(const FeSpace& space, const TensorFn& grad,
                                       const EssentialConstraints& constraints, double tol) {
  TPMHD_REQUIRE(space.components() == 2, InvalidArgument, "vector space expected");
  auto b = assemble_curl_div_source(space, grad, 1.0, 1.0);
  CsrMatrix a = assemble_curlcurl_divdiv(space, 1.0, 1.0).matrix;
  constraints.apply(a, b);
  return solve_linear(a, b, tol);
}

std::vector<double> maxwell_projection(const FeSpace& space, const VectorFn& f, const TensorFn& grad, double tol) {
  return maxwell_projection(space, grad, tangential_constraints(space, f), tol);
}

}  // namespace tpmhd
