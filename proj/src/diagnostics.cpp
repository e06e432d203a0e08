#include "diagnostics.hpp"

#include <cmath>

#include "errors.hpp"

namespace tpmhd {

namespace {

// Sums jxw * f(cell, bary, x) over every quadrature point of the mesh.
template <class F>
double integrate_cells(const Mesh& mesh, F f) {
  const QuadratureRule& rule = quadrature_rule(kAssemblyQuadratureDegree);
  double sum = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const double area = std::abs(g.det);
    double cell_sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) cell_sum += rule.weights[q] * f(c, rule.points[q], g.map(rule.points[q]));
    sum += area * cell_sum;
  }
  return sum;
}

double sq(double v) { return v * v; }
double sq(Vec2 v) { return v.x * v.x + v.y * v.y; }
double sq(const Mat2& m) { return m.xx * m.xx + m.xy * m.xy + m.yx * m.yx + m.yy * m.yy; }
Mat2 operator-(const Mat2& a, const Mat2& b) { return {a.xx - b.xx, a.xy - b.xy, a.yx - b.yx, a.yy - b.yy}; }

void require_length(const FeSpace& space, std::span<const double> coeffs) {
  TPMHD_REQUIRE(coeffs.size() == space.n_dofs(), InvalidArgument, "coefficient length mismatch");
}

}  // namespace

EnergyReport energy(const ProblemSpaces& s, const StateFields& x, const SchemeParams& params) {
  const FeSpace& ph = s.phase;
  const double grad_phi = integrate_cells(*s.mesh, [&](std::size_t c, const auto& l, Point2) {
    return sq(eval_scalar_gradient(ph, x.phi, c, l));
  });
  const double bulk = integrate_cells(*s.mesh, [&](std::size_t c, const auto& l, Point2) {
    return 0.25 * sq(sq(eval_scalar(ph, x.phi, c, l)) - 1.0);
  });
  const double kinetic = integrate_cells(*s.mesh, [&](std::size_t c, const auto& l, Point2) {
    return sq(eval_vector(s.velocity, x.u, c, l));
  });
  const double magnetic = integrate_cells(*s.mesh, [&](std::size_t c, const auto& l, Point2) {
    return sq(eval_vector(s.magnetic, x.B, c, l));
  });
  EnergyReport r;
  r.energy = params.lambda * (0.5 * params.gamma * grad_phi + bulk / params.gamma) + 0.5 * kinetic +
             0.5 * magnetic / params.mu;
  r.diss_omega = integrate_cells(*s.mesh, [&](std::size_t c, const auto& l, Point2) {
    return sq(eval_scalar_gradient(ph, x.omega, c, l));
  });
  r.diss_u = integrate_cells(*s.mesh, [&](std::size_t c, const auto& l, Point2) {
    return sq(eval_vector_gradient(s.velocity, x.u, c, l));
  });
  r.diss_curlB = integrate_cells(*s.mesh, [&](std::size_t c, const auto& l, Point2) {
    const Mat2 g = eval_vector_gradient(s.magnetic, x.B, c, l);
    return sq(g.yx - g.xy);
  });
  r.diss_divB = integrate_cells(*s.mesh, [&](std::size_t c, const auto& l, Point2) {
    const Mat2 g = eval_vector_gradient(s.magnetic, x.B, c, l);
    return sq(g.xx + g.yy);
  });
  return r;
}

double total_mass(const FeSpace& space, std::span<const double> coeffs) {
  require_length(space, coeffs);
  return integrate_cells(space.mesh(), [&](std::size_t c, const auto& l, Point2) {
    return eval_scalar(space, coeffs, c, l);
  });
}

double l2_error(const FeSpace& space, std::span<const double> coeffs, const ScalarFn& exact) {
  require_length(space, coeffs);
  return std::sqrt(integrate_cells(space.mesh(), [&](std::size_t c, const auto& l, Point2 p) {
    return sq(eval_scalar(space, coeffs, c, l) - exact(p));
  }));
}

double l2_error_vector(const FeSpace& space, std::span<const double> coeffs, const VectorFn& exact) {
  require_length(space, coeffs);
  return std::sqrt(integrate_cells(space.mesh(), [&](std::size_t c, const auto& l, Point2 p) {
    return sq(eval_vector(space, coeffs, c, l) - exact(p));
  }));
}

double h1semi_error(const FeSpace& space, std::span<const double> coeffs, const GradientFn& exact) {
  require_length(space, coeffs);
  return std::sqrt(integrate_cells(space.mesh(), [&](std::size_t c, const auto& l, Point2 p) {
    return sq(eval_scalar_gradient(space, coeffs, c, l) - exact(p));
  }));
}

double h1semi_error_vector(const FeSpace& space, std::span<const double> coeffs, const TensorFn& exact) {
  require_length(space, coeffs);
  return std::sqrt(integrate_cells(space.mesh(), [&](std::size_t c, const auto& l, Point2 p) {
    return sq(eval_vector_gradient(space, coeffs, c, l) - exact(p));
  }));
}

double curl_error(const FeSpace& space, std::span<const double> coeffs, const TensorFn& exact) {
  require_length(space, coeffs);
  return std::sqrt(integrate_cells(space.mesh(), [&](std::size_t c, const auto& l, Point2 p) {
    const Mat2 d = eval_vector_gradient(space, coeffs, c, l) - exact(p);
    return sq(d.yx - d.xy);
  }));
}

double div_error(const FeSpace& space, std::span<const double> coeffs, const TensorFn& exact) {
  require_length(space, coeffs);
  return std::sqrt(integrate_cells(space.mesh(), [&](std::size_t c, const auto& l, Point2 p) {
    const Mat2 d = eval_vector_gradient(space, coeffs, c, l) - exact(p);
    return sq(d.xx + d.yy);
  }));
}

const std::array<const char*, ErrorReport::kCount>& ErrorReport::names() {
  static const std::array<const char*, kCount> n = {"l2_phi", "h1semi_phi", "l2_omega", "l2_u",     "h1semi_u",
                                                     "l2_p",   "l2_B",       "h1semi_B", "curl_B", "div_B"};
  return n;
}

std::array<double, ErrorReport::kCount> ErrorReport::values() const {
  return {l2_phi, h1semi_phi, l2_omega, l2_u, h1semi_u, l2_p, l2_B, h1semi_B, curl_B, div_B};
}

ErrorReport error_norms(const ProblemSpaces& s, const StateFields& x, const ExactSolution& e, double t) {
  const auto at = [t](const auto& f) { return [&f, t](Point2 p) { return f(p, t); }; };
  ErrorReport r;
  r.l2_phi = l2_error(s.phase, x.phi, at(e.phi));
  r.h1semi_phi = h1semi_error(s.phase, x.phi, at(e.grad_phi));
  r.l2_omega = l2_error(s.phase, x.omega, at(e.omega));
  r.l2_u = l2_error_vector(s.velocity, x.u, at(e.u));
  r.h1semi_u = h1semi_error_vector(s.velocity, x.u, at(e.grad_u));
  const double p_mean = integrate_cells(*s.mesh, [&](std::size_t, const auto&, Point2 p) { return e.p(p, t); });
  r.l2_p = l2_error(s.pressure, x.p, [&](Point2 p) { return e.p(p, t) - p_mean; });
  r.l2_B = l2_error_vector(s.magnetic, x.B, at(e.B));
  r.h1semi_B = h1semi_error_vector(s.magnetic, x.B, at(e.grad_B));
  r.curl_B = curl_error(s.magnetic, x.B, at(e.grad_B));
  r.div_B = div_error(s.magnetic, x.B, at(e.grad_B));
  return r;
}

double observed_rate(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

std::vector<RateRow> rate_table(std::span<const RateInput> rows) {
  TPMHD_REQUIRE(!rows.empty(), InvalidArgument, "rate table needs at least one row");
  std::vector<RateRow> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    TPMHD_REQUIRE(rows[i].h > 0.0, InvalidArgument, "mesh sizes must be positive");
    RateRow r;
    r.h = rows[i].h;
    r.dt = rows[i].dt;
    r.errors = rows[i].errors.values();
    if (i > 0) {
      TPMHD_REQUIRE(rows[i].h < rows[i - 1].h, InvalidArgument, "mesh sizes must strictly decrease");
      for (std::size_t k = 0; k < ErrorReport::kCount; ++k) {
        r.rates[k] = observed_rate(out.back().errors[k], r.errors[k], out.back().h, r.h);
      }
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace tpmhd
