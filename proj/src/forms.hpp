#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "fespace.hpp"
#include "sparse.hpp"

namespace tpmhd {

// Physical and numerical parameters of one run.
struct SchemeParams {
  double gamma = 1.0;     // interface width
  double mobility = 1.0;  // M
  double nu = 1.0;        // viscosity
  double mu = 1.0;        // magnetic permeability
  double lambda = 1.0;    // capillary coefficient
  double sigma = 1.0;     // electric conductivity
  double dt = 1e-2;
  double t_final = 1.0;
  double newton_tol = 1e-10;
  int newton_max = 25;
  double lin_tol = kDefaultLinearTolerance;
  std::uint64_t seed = 0;

  // Throws InvalidArgument when a positivity requirement fails.
  void validate() const;
};

struct SpaceInfo {
  ElementFamily family = ElementFamily::P1;
  std::size_t components = 1;
  std::size_t n_dofs = 0;
};

SpaceInfo describe(const FeSpace& space);

// Matrix with rows indexed by test functions of row_space and columns by
// trial functions of col_space.
struct AssembledOperator {
  CsrMatrix matrix;
  SpaceInfo row_space;
  SpaceInfo col_space;
};

using TimeScalarFn = std::function<double(Point2, double)>;
using TimeVectorFn = std::function<Vec2(Point2, double)>;

// c * (phi_j, phi_i). Block diagonal for vector spaces.
AssembledOperator assemble_mass(const FeSpace& space, double c = 1.0);

// c * (grad phi_j, grad phi_i), componentwise for vector spaces.
AssembledOperator assemble_stiffness(const FeSpace& space, double c = 1.0);

// Rows: pressure q, columns: velocity v. Entry (q, div v).
AssembledOperator assemble_div_coupling(const FeSpace& velocity, const FeSpace& pressure);

// Skew convection b(w, phi_j, phi_i) = 1/2 [(w.grad phi_j, phi_i) - (w.grad phi_i, phi_j)]
// with w the velocity field u_prev.
AssembledOperator assemble_convection(const FeSpace& velocity, std::span<const double> u_prev);

struct OperatorPair {
  AssembledOperator forward;  // first named operator
  AssembledOperator adjoint;  // its transpose
};

// forward: rows scalar xi, columns velocity v, entry ((grad phi_prev . v), xi).
// adjoint: rows v, columns omega, entry (omega grad phi_prev, v).
OperatorPair assemble_phase_transport(const FeSpace& scalar, const FeSpace& velocity,
                                      std::span<const double> phi_prev);

// forward: rows velocity v, columns magnetic zeta, entry c (curl zeta, v x B_prev).
// adjoint: rows zeta, columns v, entry c (v x B_prev, curl zeta).
OperatorPair assemble_lorentz(const FeSpace& magnetic, const FeSpace& velocity,
                              std::span<const double> b_prev, double c = 1.0);

// c_curl (curl phi_j, curl phi_i) + c_div (div phi_j, div phi_i).
AssembledOperator assemble_curlcurl_divdiv(const FeSpace& magnetic, double c_curl, double c_div);

struct CubicTerm {
  std::vector<double> residual;  // c ((phi_iter^3 - phi_prev), psi_i)
  AssembledOperator jacobian;    // c (3 phi_iter^2 phi_j, phi_i)
};

CubicTerm cubic_term(const FeSpace& scalar, std::span<const double> phi_iter,
                     std::span<const double> phi_prev, double c = 1.0);

// Load vectors (g, phi_i).
std::vector<double> assemble_source(const FeSpace& space, const TimeScalarFn& g, double t);
std::vector<double> assemble_source(const FeSpace& space, const TimeVectorFn& g, double t);

// (g, grad phi_i) on a scalar space.
std::vector<double> assemble_gradient_source(const FeSpace& space, const GradientFn& g);

// c_curl (curl f, curl phi_i) + c_div (div f, div phi_i), from the Jacobian of f.
std::vector<double> assemble_curl_div_source(const FeSpace& space, const TensorFn& grad, double c_curl,
                                             double c_div);

}  // namespace tpmhd
