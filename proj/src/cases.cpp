#include "cases.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "projections.hpp"

namespace tpmhd {

const char* to_string(BcKind kind) {
  switch (kind) {
    case BcKind::None: return "None";
    case BcKind::DirichletFull: return "DirichletFull";
    case BcKind::DirichletTangential: return "DirichletTangential";
    case BcKind::NormalZero: return "NormalZero";
    case BcKind::PeriodicX: return "PeriodicX";
  }
  return "?";
}

const char* to_string(KhMode mode) { return mode == KhMode::Single ? "single" : "double"; }

std::size_t normal_component(BoundaryTag tag) { return 1 - tangential_component(tag); }

namespace {

void validate_field(const FieldBc& f, bool periodic_x, bool vector, const char* name) {
  for (BoundaryTag tag : kAllBoundaryTags) {
    const BcSide& side = f[static_cast<std::size_t>(tag)];
    const bool lateral = tag == BoundaryTag::Left || tag == BoundaryTag::Right;
    const std::string where = std::string(name) + " on " + to_string(tag);
    TPMHD_REQUIRE((side.kind == BcKind::PeriodicX) == (periodic_x && lateral), InvalidArgument,
                  where + ": periodic sides must match the mesh");
    if (!vector) {
      TPMHD_REQUIRE(side.kind == BcKind::None || side.kind == BcKind::PeriodicX, InvalidArgument,
                    where + ": scalar fields take natural or periodic conditions");
    }
    if (side.kind == BcKind::DirichletFull || side.kind == BcKind::DirichletTangential) {
      TPMHD_REQUIRE(static_cast<bool>(side.data), InvalidArgument, where + ": Dirichlet condition without data");
    }
  }
}

FieldBc uniform(BcKind kind, const TimeVectorFn& data, bool periodic_x) {
  FieldBc f;
  for (BoundaryTag tag : kAllBoundaryTags) {
    const bool lateral = tag == BoundaryTag::Left || tag == BoundaryTag::Right;
    f[static_cast<std::size_t>(tag)] = periodic_x && lateral ? BcSide{BcKind::PeriodicX, {}} : BcSide{kind, data};
  }
  return f;
}

constexpr double kPi = std::numbers::pi;

// One-dimensional profiles and their derivatives.
double X0(double s) { return std::cos(kPi * s) * std::cos(kPi * s); }
double X1(double s) { return -kPi * std::sin(2 * kPi * s); }
double X2(double s) { return -2 * kPi * kPi * std::cos(2 * kPi * s); }
double X3(double s) { return 4 * kPi * kPi * kPi * std::sin(2 * kPi * s); }
double X4(double s) { return 8 * kPi * kPi * kPi * kPi * std::cos(2 * kPi * s); }
double S0(double s) { return std::sin(kPi * s) * std::sin(kPi * s); }
double S1(double s) { return kPi * std::sin(2 * kPi * s); }
double S2(double s) { return 2 * kPi * kPi * std::cos(2 * kPi * s); }
double T0(double s) { return std::sin(2 * kPi * s); }
double T1(double s) { return 2 * kPi * std::cos(2 * kPi * s); }
double T2(double s) { return -4 * kPi * kPi * std::sin(2 * kPi * s); }

}  // namespace

void validate(const BcSpec& bc, bool periodic_x) {
  validate_field(bc.phi, periodic_x, false, "phi");
  validate_field(bc.omega, periodic_x, false, "omega");
  validate_field(bc.u, periodic_x, true, "u");
  validate_field(bc.B, periodic_x, true, "B");
}

double ManufacturedSolution::phi(Point2 x, double t) const { return std::cos(t) * X0(x.x) * X0(x.y); }
double ManufacturedSolution::phi_t(Point2 x, double t) const { return -std::sin(t) * X0(x.x) * X0(x.y); }
Vec2 ManufacturedSolution::grad_phi(Point2 x, double t) const {
  return std::cos(t) * Vec2{X1(x.x) * X0(x.y), X0(x.x) * X1(x.y)};
}
double ManufacturedSolution::lap_phi(Point2 x, double t) const {
  return std::cos(t) * (X2(x.x) * X0(x.y) + X0(x.x) * X2(x.y));
}
Vec2 ManufacturedSolution::grad_lap_phi(Point2 x, double t) const {
  return std::cos(t) * Vec2{X3(x.x) * X0(x.y) + X1(x.x) * X2(x.y), X2(x.x) * X1(x.y) + X0(x.x) * X3(x.y)};
}
double ManufacturedSolution::bilap_phi(Point2 x, double t) const {
  return std::cos(t) * (X4(x.x) * X0(x.y) + 2 * X2(x.x) * X2(x.y) + X0(x.x) * X4(x.y));
}

double ManufacturedSolution::omega(Point2 x, double t) const {
  const double f = phi(x, t);
  return -p_.gamma * lap_phi(x, t) + (f * f * f - f) / p_.gamma;
}
Vec2 ManufacturedSolution::grad_omega(Point2 x, double t) const {
  const double f = phi(x, t);
  return -p_.gamma * grad_lap_phi(x, t) + ((3 * f * f - 1) / p_.gamma) * grad_phi(x, t);
}
double ManufacturedSolution::lap_omega(Point2 x, double t) const {
  const double f = phi(x, t);
  const Vec2 g = grad_phi(x, t);
  return -p_.gamma * bilap_phi(x, t) + ((3 * f * f - 1) * lap_phi(x, t) + 6 * f * dot(g, g)) / p_.gamma;
}

Vec2 ManufacturedSolution::u(Point2 x, double t) const {
  return (std::cos(t) * kPi) * Vec2{S0(x.x) * T0(x.y), -T0(x.x) * S0(x.y)};
}
Vec2 ManufacturedSolution::u_t(Point2 x, double t) const {
  return (-std::sin(t) * kPi) * Vec2{S0(x.x) * T0(x.y), -T0(x.x) * S0(x.y)};
}
Mat2 ManufacturedSolution::grad_u(Point2 x, double t) const {
  const double c = std::cos(t) * kPi;
  return {c * S1(x.x) * T0(x.y), c * S0(x.x) * T1(x.y), -c * T1(x.x) * S0(x.y), -c * T0(x.x) * S1(x.y)};
}
Vec2 ManufacturedSolution::lap_u(Point2 x, double t) const {
  const double c = std::cos(t) * kPi;
  return {c * (S2(x.x) * T0(x.y) + S0(x.x) * T2(x.y)), -c * (T2(x.x) * S0(x.y) + T0(x.x) * S2(x.y))};
}

double ManufacturedSolution::p(Point2 x, double t) const { return std::cos(t) * (2 * x.x - 2) * (2 * x.y - 1); }
Vec2 ManufacturedSolution::grad_p(Point2 x, double t) const {
  return std::cos(t) * Vec2{2 * (2 * x.y - 1), 2 * (2 * x.x - 2)};
}

Vec2 ManufacturedSolution::B(Point2 x, double t) const {
  return std::cos(t) * Vec2{std::sin(kPi * x.x) * std::cos(kPi * x.y), -std::sin(kPi * x.y) * std::cos(kPi * x.x)};
}
Vec2 ManufacturedSolution::B_t(Point2 x, double t) const {
  return -std::sin(t) * Vec2{std::sin(kPi * x.x) * std::cos(kPi * x.y), -std::sin(kPi * x.y) * std::cos(kPi * x.x)};
}
Mat2 ManufacturedSolution::grad_B(Point2 x, double t) const {
  const double c = std::cos(t) * kPi;
  const double sx = std::sin(kPi * x.x), cx = std::cos(kPi * x.x);
  const double sy = std::sin(kPi * x.y), cy = std::cos(kPi * x.y);
  return {c * cx * cy, -c * sx * sy, c * sx * sy, -c * cx * cy};
}
double ManufacturedSolution::curl_B(Point2 x, double t) const {
  const Mat2 g = grad_B(x, t);
  return g.yx - g.xy;
}
Vec2 ManufacturedSolution::grad_curl_B(Point2 x, double t) const {
  const double c = 2 * kPi * kPi * std::cos(t);
  return c * Vec2{std::cos(kPi * x.x) * std::sin(kPi * x.y), std::sin(kPi * x.x) * std::cos(kPi * x.y)};
}

double ManufacturedSolution::cross_uB(Point2 x, double t) const {
  const Vec2 v = u(x, t), b = B(x, t);
  return v.x * b.y - v.y * b.x;
}
Vec2 ManufacturedSolution::grad_cross_uB(Point2 x, double t) const {
  const Vec2 v = u(x, t), b = B(x, t);
  const Mat2 gu = grad_u(x, t), gb = grad_B(x, t);
  return {gu.xx * b.y + v.x * gb.yx - gu.yx * b.x - v.y * gb.xx,
          gu.xy * b.y + v.x * gb.yy - gu.yy * b.x - v.y * gb.xy};
}

double ManufacturedSolution::source_phi(Point2 x, double t) const {
  return phi_t(x, t) + dot(u(x, t), grad_phi(x, t)) - p_.mobility * p_.gamma * lap_omega(x, t);
}

Vec2 ManufacturedSolution::source_u(Point2 x, double t) const {
  const Vec2 v = u(x, t), b = B(x, t);
  const Mat2 g = grad_u(x, t);
  const Vec2 convect = {v.x * g.xx + v.y * g.xy, v.x * g.yx + v.y * g.yy};
  const double j = curl_B(x, t);
  const Vec2 lorentz = (1.0 / p_.mu) * Vec2{j * b.y, -j * b.x};
  return u_t(x, t) - p_.nu * lap_u(x, t) + convect + lorentz + grad_p(x, t) -
         (p_.lambda * omega(x, t)) * grad_phi(x, t);
}

Vec2 ManufacturedSolution::source_B(Point2 x, double t) const {
  const Vec2 gj = grad_curl_B(x, t), gw = grad_cross_uB(x, t);
  const Vec2 rot_j = {gj.y, -gj.x}, rot_w = {gw.y, -gw.x};
  return B_t(x, t) + (1.0 / (p_.mu * p_.sigma)) * rot_j - rot_w;
}

ExactSolution ManufacturedSolution::bundle() const {
  const ManufacturedSolution m = *this;
  return {[m](Point2 x, double t) { return m.phi(x, t); },   [m](Point2 x, double t) { return m.grad_phi(x, t); },
          [m](Point2 x, double t) { return m.omega(x, t); }, [m](Point2 x, double t) { return m.u(x, t); },
          [m](Point2 x, double t) { return m.grad_u(x, t); }, [m](Point2 x, double t) { return m.p(x, t); },
          [m](Point2 x, double t) { return m.B(x, t); },     [m](Point2 x, double t) { return m.grad_B(x, t); }};
}

ProblemCase manufactured_case(Pairing pairing, const SchemeParams& params) {
  const ManufacturedSolution m(params);
  ProblemCase c;
  c.name = std::string("manufactured case ") + to_string(pairing);
  c.pairing = pairing;
  c.bc.phi = uniform(BcKind::None, {}, false);
  c.bc.omega = uniform(BcKind::None, {}, false);
  c.bc.u = uniform(BcKind::DirichletFull, [m](Point2 x, double t) { return m.u(x, t); }, false);
  c.bc.B = uniform(BcKind::DirichletTangential, [m](Point2 x, double t) { return m.B(x, t); }, false);
  c.phi0 = [m](Point2 x) { return m.phi(x, 0.0); };
  c.grad_phi0 = [m](Point2 x) { return m.grad_phi(x, 0.0); };
  c.omega0 = [m](Point2 x) { return m.omega(x, 0.0); };
  c.u0 = [m](Point2 x) { return m.u(x, 0.0); };
  c.B0 = [m](Point2 x) { return m.B(x, 0.0); };
  c.grad_B0 = [m](Point2 x) { return m.grad_B(x, 0.0); };
  c.exact = m.bundle();
  c.source_phi = [m](Point2 x, double t) { return m.source_phi(x, t); };
  c.source_u = [m](Point2 x, double t) { return m.source_u(x, t); };
  c.source_B = [m](Point2 x, double t) { return m.source_B(x, t); };
  return c;
}

std::vector<double> spinodal_noise(const FeSpace& phase, std::uint64_t seed) {
  TPMHD_REQUIRE(phase.components() == 1 && phase.family() == ElementFamily::P1, InvalidArgument,
                "noise is defined on a scalar P1 space");
  std::mt19937_64 rng(seed);
  std::vector<double> v(phase.n_dofs());
  // Top 53 bits to [0, 1), then to [-1, 1]; identical on every platform.
  for (double& x : v) x = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  const double mean = total_mass(phase, v);  // |Omega| = 1
  for (double& x : v) x -= mean;
  return v;
}

ProblemCase spinodal_case(std::uint64_t seed) {
  ProblemCase c;
  c.name = "spinodal decomposition";
  c.pairing = Pairing::I;
  const TimeVectorFn zero = [](Point2, double) { return Vec2{}; };
  c.bc.phi = uniform(BcKind::None, {}, false);
  c.bc.omega = uniform(BcKind::None, {}, false);
  c.bc.u = uniform(BcKind::DirichletFull, zero, false);
  c.bc.B = uniform(BcKind::DirichletFull, zero, false);
  c.phi0_discrete = [seed](const FeSpace& s) {
    auto v = spinodal_noise(s, seed);
    for (double& x : v) x = -0.05 + 0.001 * x;
    return v;
  };
  c.u0 = [](Point2) { return Vec2{}; };
  c.B0 = [](Point2) { return Vec2{}; };
  c.grad_B0 = [](Point2) { return Mat2{}; };
  return c;
}

ProblemCase kelvin_helmholtz_case(KhMode mode, const SchemeParams& params) {
  ProblemCase c;
  c.name = std::string("Kelvin-Helmholtz ") + to_string(mode) + " mode";
  c.pairing = Pairing::I;
  c.periodic_x = true;
  const double k = mode == KhMode::Single ? 2 * kPi : 4 * kPi;
  const double w = std::sqrt(2.0) * params.gamma;
  const auto arg = [k, w](Point2 x) { return (x.y - 0.5 - 0.01 * std::sin(k * x.x)) / w; };
  c.phi0 = [arg](Point2 x) { return std::tanh(arg(x)); };
  c.grad_phi0 = [arg, k, w](Point2 x) {
    const double th = std::tanh(arg(x));
    const double s = (1 - th * th) / w;
    return Vec2{-0.01 * k * std::cos(k * x.x) * s, s};
  };
  c.u0 = [arg](Point2 x) { return Vec2{std::tanh(arg(x)), 0.0}; };
  c.B0 = [](Point2) { return Vec2{1.0, 0.0}; };
  c.grad_B0 = [](Point2) { return Mat2{}; };

  c.bc.phi = uniform(BcKind::None, {}, true);
  c.bc.omega = uniform(BcKind::None, {}, true);
  c.bc.u = uniform(BcKind::NormalZero, {}, true);
  c.bc.B = uniform(BcKind::DirichletFull, [](Point2, double) { return Vec2{-1.0, 0.0}; }, true);
  return c;
}

}  // namespace tpmhd
