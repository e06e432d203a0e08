#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "fespace.hpp"
#include "sparse.hpp"

namespace tpmhd {

// Fixed values for a set of global DOFs. Adding a DOF twice keeps the first value.
class EssentialConstraints {
 public:
  void add(std::size_t dof, double value) { fixed_.emplace(dof, value); }
  void merge(const EssentialConstraints& other, std::size_t offset = 0);
  bool contains(std::size_t dof) const { return fixed_.count(dof) != 0; }
  bool empty() const { return fixed_.empty(); }
  std::size_t size() const { return fixed_.size(); }

  std::vector<std::size_t> dofs() const;
  std::vector<double> values() const;
  void apply(CsrMatrix& a, std::span<double> rhs) const;

 private:
  std::map<std::size_t, double> fixed_;
};

// Bottom/Top: x component; Left/Right: y component.
std::size_t tangential_component(BoundaryTag tag);

// Fixes component comp on one side to value(dof point).
void constrain_boundary(EssentialConstraints& out, const FeSpace& space, BoundaryTag tag, std::size_t comp,
                        const ScalarFn& value);

// Tangential trace of f on every side of a non-periodic mesh (both components at corners).
EssentialConstraints tangential_constraints(const FeSpace& space, const VectorFn& f);

// Ritz projection with matching mean.
std::vector<double> ritz_projection(const FeSpace& space, const ScalarFn& f, const GradientFn& grad,
                                    double tol = kDefaultLinearTolerance);
// Same projection of a member of the space given by its coefficients.
std::vector<double> ritz_projection(const FeSpace& space, std::span<const double> coeffs,
                                    double tol = kDefaultLinearTolerance);

std::vector<double> l2_projection(const FeSpace& space, const ScalarFn& f, double tol = kDefaultLinearTolerance);
std::vector<double> l2_projection(const FeSpace& space, const VectorFn& f,
                                  const EssentialConstraints& constraints = {},
                                  double tol = kDefaultLinearTolerance);

// Curl-curl plus div-div projection with the given constrained DOFs.
std::vector<double> maxwell_projection(const FeSpace& space, const TensorFn& grad,
                                       const EssentialConstraints& constraints,
                                       double tol = kDefaultLinearTolerance);
// Tangential trace fixed from f itself.
std::vector<double> maxwell_projection(const FeSpace& space, const VectorFn& f, const TensorFn& grad,
                                       double tol = kDefaultLinearTolerance);

}  // namespace tpmhd
