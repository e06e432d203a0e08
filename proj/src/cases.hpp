#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "state.hpp"

namespace tpmhd {

enum class BcKind { None, DirichletFull, DirichletTangential, NormalZero, PeriodicX };

const char* to_string(BcKind kind);

struct BcSide {
  BcKind kind = BcKind::None;
  TimeVectorFn data;  // Dirichlet kinds only
};

// Indexed by BoundaryTag.
using FieldBc = std::array<BcSide, 4>;

struct BcSpec {
  FieldBc phi;
  FieldBc omega;
  FieldBc u;
  FieldBc B;
};

// Throws InvalidArgument when the spec does not fit the mesh: PeriodicX on
// left/right exactly when the mesh is periodic, scalar fields natural or periodic,
// Dirichlet kinds carrying data.
void validate(const BcSpec& bc, bool periodic_x);

// Bottom/Top: y component; Left/Right: x component.
std::size_t normal_component(BoundaryTag tag);

enum class KhMode { Single, Double };

const char* to_string(KhMode mode);

struct ProblemCase {
  std::string name;
  Pairing pairing = Pairing::I;
  bool periodic_x = false;
  BcSpec bc;

  // Initial phase: either analytic (with gradient, Ritz projected) or discrete.
  ScalarFn phi0;
  GradientFn grad_phi0;
  std::function<std::vector<double>(const FeSpace&)> phi0_discrete;
  ScalarFn omega0;  // interpolated when set, else zero
  VectorFn u0;
  VectorFn B0;
  TensorFn grad_B0;

  std::optional<ExactSolution> exact;
  TimeScalarFn source_phi;  // right sides of the phase, momentum and induction rows
  TimeVectorFn source_u;
  TimeVectorFn source_B;
};

// Smooth exact solution on the unit square with closed-form derivatives.
class ManufacturedSolution {
 public:
  explicit ManufacturedSolution(const SchemeParams& params) : p_(params) {}

  double phi(Point2 x, double t) const;
  double phi_t(Point2 x, double t) const;
  Vec2 grad_phi(Point2 x, double t) const;
  double lap_phi(Point2 x, double t) const;
  Vec2 grad_lap_phi(Point2 x, double t) const;
  double bilap_phi(Point2 x, double t) const;

  // omega = -gamma lap phi + (phi^3 - phi) / gamma
  double omega(Point2 x, double t) const;
  Vec2 grad_omega(Point2 x, double t) const;
  double lap_omega(Point2 x, double t) const;

  Vec2 u(Point2 x, double t) const;
  Vec2 u_t(Point2 x, double t) const;
  Mat2 grad_u(Point2 x, double t) const;
  Vec2 lap_u(Point2 x, double t) const;

  double p(Point2 x, double t) const;
  Vec2 grad_p(Point2 x, double t) const;

  Vec2 B(Point2 x, double t) const;
  Vec2 B_t(Point2 x, double t) const;
  Mat2 grad_B(Point2 x, double t) const;
  double curl_B(Point2 x, double t) const;
  Vec2 grad_curl_B(Point2 x, double t) const;

  // u1 B2 - u2 B1 and its gradient.
  double cross_uB(Point2 x, double t) const;
  Vec2 grad_cross_uB(Point2 x, double t) const;

  double source_phi(Point2 x, double t) const;
  Vec2 source_u(Point2 x, double t) const;
  Vec2 source_B(Point2 x, double t) const;

  ExactSolution bundle() const;

 private:
  SchemeParams p_;
};

ProblemCase manufactured_case(Pairing pairing, const SchemeParams& params);

// Per-vertex uniform noise on [-1, 1] with its discrete mean removed.
std::vector<double> spinodal_noise(const FeSpace& phase, std::uint64_t seed);

ProblemCase spinodal_case(std::uint64_t seed);

ProblemCase kelvin_helmholtz_case(KhMode mode, const SchemeParams& params);

}  // namespace tpmhd
