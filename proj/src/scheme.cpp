#include "scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "diagnostics.hpp"
#include "errors.hpp"

namespace tpmhd {

ProblemSpaces make_problem_spaces(const ProblemCase& pc, std::size_t n) {
  TPMHD_REQUIRE(n >= 1, InvalidArgument, "cells per side must be positive");
  auto mesh = std::make_shared<const Mesh>(Mesh::structured(n, pc.periodic_x));
  return make_problem_spaces(std::move(mesh), pc.pairing);
}

BlockLayout::BlockLayout(const ProblemSpaces& s) {
  phi = 0;
  omega = s.phase.n_dofs();
  u = omega + s.phase.n_dofs();
  p = u + s.velocity.n_dofs();
  B = p + s.pressure.n_dofs();
  mult = B + s.magnetic.n_dofs();
  size = mult + 1;
}

std::vector<double> pack(const ProblemSpaces& s, const StateFields& x) {
  const BlockLayout l(s);
  TPMHD_REQUIRE(x.phi.size() == s.phase.n_dofs() && x.omega.size() == s.phase.n_dofs() &&
                    x.u.size() == s.velocity.n_dofs() && x.p.size() == s.pressure.n_dofs() &&
                    x.B.size() == s.magnetic.n_dofs(),
                InvalidArgument, "state does not match the spaces");
  std::vector<double> v(l.size, 0.0);
  std::copy(x.phi.begin(), x.phi.end(), v.begin() + l.phi);
  std::copy(x.omega.begin(), x.omega.end(), v.begin() + l.omega);
  std::copy(x.u.begin(), x.u.end(), v.begin() + l.u);
  std::copy(x.p.begin(), x.p.end(), v.begin() + l.p);
  std::copy(x.B.begin(), x.B.end(), v.begin() + l.B);
  return v;
}

StateFields unpack(const ProblemSpaces& s, std::span<const double> v, double t, std::size_t k) {
  const BlockLayout l(s);
  TPMHD_REQUIRE(v.size() == l.size, InvalidArgument, "vector does not match the spaces");
  auto slice = [&](std::size_t a, std::size_t b) { return std::vector<double>(v.begin() + a, v.begin() + b); };
  StateFields x;
  x.phi = slice(l.phi, l.omega);
  x.omega = slice(l.omega, l.u);
  x.u = slice(l.u, l.p);
  x.p = slice(l.p, l.B);
  x.B = slice(l.B, l.mult);
  x.t = t;
  x.k = k;
  return x;
}

EssentialConstraints field_constraints(const FeSpace& space, const FieldBc& bc,
                                       const std::function<Vec2(BoundaryTag, Point2)>& value) {
  EssentialConstraints out;
  for (BoundaryTag tag : kAllBoundaryTags) {
    const BcSide& side = bc[static_cast<std::size_t>(tag)];
    auto comp_of = [&](std::size_t c) -> ScalarFn {
      return [&value, tag, c](Point2 p) { return c == 0 ? value(tag, p).x : value(tag, p).y; };
    };
    switch (side.kind) {
      case BcKind::DirichletFull:
        constrain_boundary(out, space, tag, 0, comp_of(0));
        constrain_boundary(out, space, tag, 1, comp_of(1));
        break;
      case BcKind::DirichletTangential: {
        const std::size_t c = tangential_component(tag);
        constrain_boundary(out, space, tag, c, comp_of(c));
        break;
      }
      case BcKind::NormalZero:
        constrain_boundary(out, space, tag, normal_component(tag), [](Point2) { return 0.0; });
        break;
      case BcKind::None:
      case BcKind::PeriodicX:
        break;
    }
  }
  return out;
}

namespace {

std::function<Vec2(BoundaryTag, Point2)> bc_data(const FieldBc& bc, double t) {
  return [&bc, t](BoundaryTag tag, Point2 p) {
    const BcSide& side = bc[static_cast<std::size_t>(tag)];
    return side.data ? side.data(p, t) : Vec2{};
  };
}

}  // namespace

EssentialConstraints step_constraints(const ProblemSpaces& s, const BcSpec& bc, double t) {
  const BlockLayout l(s);
  EssentialConstraints out;
  out.merge(field_constraints(s.velocity, bc.u, bc_data(bc.u, t)), l.u);
  out.merge(field_constraints(s.magnetic, bc.B, bc_data(bc.B, t)), l.B);
  return out;
}

StateFields initialize(const ProblemSpaces& s, const ProblemCase& pc, const SchemeParams& params) {
  params.validate();
  validate(pc.bc, pc.periodic_x);
  TPMHD_REQUIRE(s.mesh->periodic_x() == pc.periodic_x, InvalidArgument, "mesh periodicity does not match the case");
  const double tol = params.lin_tol;
  StateFields x = StateFields::zeros(s);

  if (pc.phi0_discrete) {
    x.phi = ritz_projection(s.phase, pc.phi0_discrete(s.phase), tol);
  } else {
    TPMHD_REQUIRE(pc.phi0 && pc.grad_phi0, InvalidArgument, "case has no initial phase");
    x.phi = ritz_projection(s.phase, pc.phi0, pc.grad_phi0, tol);
  }
  if (pc.omega0) x.omega = interpolate(s.phase, pc.omega0);

  if (pc.u0) {
    x.u = l2_projection(s.velocity, pc.u0, field_constraints(s.velocity, pc.bc.u, bc_data(pc.bc.u, 0.0)), tol);
  }
  if (pc.B0) {
    TPMHD_REQUIRE(pc.grad_B0, InvalidArgument, "initial magnetic field needs its gradient");
    const VectorFn& b0 = pc.B0;
    const auto trace = field_constraints(s.magnetic, pc.bc.B, [&b0](BoundaryTag, Point2 p) { return b0(p); });
    x.B = maxwell_projection(s.magnetic, pc.grad_B0, trace, tol);
  }
  return x;
}

struct StepSolver::Impl {
  ProblemSpaces s;
  ProblemCase pc;
  SchemeParams prm;
  BlockLayout l;

  CsrMatrix pattern;                 // monolithic pattern, values unused
  std::vector<double> static_values;  // time-independent blocks in pattern positions
  std::vector<double> mass_p;        // (1, psi_i)
  CsrMatrix mass_phase, mass_u, mass_B;

  // Pattern positions of the state-dependent blocks.
  std::vector<std::size_t> map_transport_fwd, map_transport_adj, map_convection, map_lorentz_fwd,
      map_lorentz_adj, map_cubic;

  // Linear part of the current step and its right side.
  CsrMatrix a;
  std::vector<double> b;
  EssentialConstraints bc;
  std::vector<std::size_t> bc_dofs;
  std::vector<double> bc_values;
  CsrMatrix j_work;

  LinearSolver solver;

  Impl(const ProblemSpaces& spaces, const ProblemCase& c, const SchemeParams& p) : s(spaces), pc(c), prm(p), l(s) {
    prm.validate();
    validate(pc.bc, pc.periodic_x);
    TPMHD_REQUIRE(s.mesh->periodic_x() == pc.periodic_x, InvalidArgument, "mesh periodicity does not match the case");
    build_pattern();
  }

  struct Placed {
    const CsrMatrix* m;
    std::size_t r, c;
    double scale;
  };

  std::vector<std::size_t> positions(const CsrMatrix& m, std::size_t r0, std::size_t c0) const {
    std::vector<std::size_t> map(m.nnz());
    const auto rp = m.row_ptr();
    const auto ci = m.col_idx();
    for (std::size_t i = 0; i < m.n_rows(); ++i) {
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
        map[k] = pattern.find(r0 + i, c0 + ci[k]);
        TPMHD_REQUIRE(map[k] != CsrMatrix::npos, Error, "block entry missing from the step pattern");
      }
    }
    return map;
  }

  static void scatter(std::span<double> out, const CsrMatrix& m, const std::vector<std::size_t>& map, double s) {
    TPMHD_REQUIRE(m.nnz() == map.size(), Error, "block pattern changed between time levels");
    const auto v = m.values();
    for (std::size_t k = 0; k < map.size(); ++k) out[map[k]] += s * v[k];
  }

  void build_pattern() {
    const double dt = prm.dt;
    const double eta = 1.0 / (prm.mu * prm.sigma);
    mass_phase = assemble_mass(s.phase).matrix;
    mass_u = assemble_mass(s.velocity).matrix;
    mass_B = assemble_mass(s.magnetic).matrix;
    const CsrMatrix k_phase = assemble_stiffness(s.phase).matrix;
    const CsrMatrix k_u = assemble_stiffness(s.velocity).matrix;
    const CsrMatrix div = assemble_div_coupling(s.velocity, s.pressure).matrix;
    const CsrMatrix div_t = div.transpose();
    const CsrMatrix maxwell = assemble_curlcurl_divdiv(s.magnetic, eta, eta).matrix;

    const CsrMatrix mp = assemble_mass(s.pressure).matrix;
    mass_p.assign(s.pressure.n_dofs(), 0.0);
    for (std::size_t i = 0; i < mp.n_rows(); ++i) {
      for (std::size_t k = mp.row_ptr()[i]; k < mp.row_ptr()[i + 1]; ++k) mass_p[i] += mp.values()[k];
    }

    // State-dependent blocks assembled at zero data fix their patterns.
    const std::vector<double> zs(s.phase.n_dofs(), 0.0), zu(s.velocity.n_dofs(), 0.0),
        zb(s.magnetic.n_dofs(), 0.0);
    const OperatorPair tr = assemble_phase_transport(s.phase, s.velocity, zs);
    const CsrMatrix conv = assemble_convection(s.velocity, zu).matrix;
    const OperatorPair lz = assemble_lorentz(s.magnetic, s.velocity, zb);
    const CsrMatrix cubic = cubic_term(s.phase, zs, zs).jacobian.matrix;

    const std::vector<Placed> fixed = {
        {&mass_phase, l.phi, l.phi, 1.0},
        {&k_phase, l.phi, l.omega, dt * prm.mobility * prm.gamma},
        {&k_phase, l.omega, l.phi, prm.gamma},
        {&mass_phase, l.omega, l.omega, -1.0},
        {&mass_u, l.u, l.u, 1.0},
        {&k_u, l.u, l.u, dt * prm.nu},
        {&div_t, l.u, l.p, -dt},
        {&div, l.p, l.u, 1.0},
        {&mass_B, l.B, l.B, 1.0},
        {&maxwell, l.B, l.B, dt},
    };
    std::vector<Triplet> t;
    for (const Placed& b : fixed) append_block(t, *b.m, b.r, b.c, b.scale);
    for (std::size_t i = 0; i < mass_p.size(); ++i) {
      t.push_back({l.p + i, l.mult, mass_p[i]});
      t.push_back({l.mult, l.p + i, mass_p[i]});
    }
    t.push_back({l.mult, l.mult, 0.0});
    // Zero-valued copies pin the positions of the state-dependent blocks.
    append_block(t, tr.forward.matrix, l.phi, l.u, 0.0);
    append_block(t, tr.adjoint.matrix, l.u, l.omega, 0.0);
    append_block(t, conv, l.u, l.u, 0.0);
    append_block(t, lz.forward.matrix, l.u, l.B, 0.0);
    append_block(t, lz.adjoint.matrix, l.B, l.u, 0.0);
    append_block(t, cubic, l.omega, l.phi, 0.0);
    // Every row keeps a stored diagonal for row replacement, and the pattern is
    // made structurally symmetric, which suits the fill-reducing ordering.
    for (std::size_t i = 0; i < l.size; ++i) t.push_back({i, i, 0.0});
    const std::size_t n_fixed = t.size();
    for (std::size_t k = 0; k < n_fixed; ++k) t.push_back({t[k].col, t[k].row, 0.0});

    pattern = triplet_to_csr(l.size, l.size, t);
    static_values.assign(pattern.nnz(), 0.0);
    {
      std::vector<Triplet> only_fixed;
      for (const Placed& b : fixed) append_block(only_fixed, *b.m, b.r, b.c, b.scale);
      for (std::size_t i = 0; i < mass_p.size(); ++i) {
        only_fixed.push_back({l.p + i, l.mult, mass_p[i]});
        only_fixed.push_back({l.mult, l.p + i, mass_p[i]});
      }
      const CsrMatrix f = triplet_to_csr(l.size, l.size, only_fixed);
      const auto map = positions(f, 0, 0);
      scatter(static_values, f, map, 1.0);
    }

    map_transport_fwd = positions(tr.forward.matrix, l.phi, l.u);
    map_transport_adj = positions(tr.adjoint.matrix, l.u, l.omega);
    map_convection = positions(conv, l.u, l.u);
    map_lorentz_fwd = positions(lz.forward.matrix, l.u, l.B);
    map_lorentz_adj = positions(lz.adjoint.matrix, l.B, l.u);
    map_cubic = positions(cubic, l.omega, l.phi);
  }

  void check_state(const StateFields& x) const {
    TPMHD_REQUIRE(x.phi.size() == s.phase.n_dofs() && x.omega.size() == s.phase.n_dofs() &&
                      x.u.size() == s.velocity.n_dofs() && x.p.size() == s.pressure.n_dofs() &&
                      x.B.size() == s.magnetic.n_dofs(),
                  InvalidArgument, "state does not match the spaces");
  }

  void prepare(const StateFields& prev, double t_next) {
    check_state(prev);
    const double dt = prm.dt;
    std::vector<double> v = static_values;
    const OperatorPair tr = assemble_phase_transport(s.phase, s.velocity, prev.phi);
    const CsrMatrix conv = assemble_convection(s.velocity, prev.u).matrix;
    const OperatorPair lz = assemble_lorentz(s.magnetic, s.velocity, prev.B);
    scatter(v, tr.forward.matrix, map_transport_fwd, dt);
    scatter(v, tr.adjoint.matrix, map_transport_adj, -dt * prm.lambda);
    scatter(v, conv, map_convection, dt);
    scatter(v, lz.forward.matrix, map_lorentz_fwd, dt / prm.mu);
    scatter(v, lz.adjoint.matrix, map_lorentz_adj, -dt);
    a = CsrMatrix(l.size, l.size, std::vector<std::size_t>(pattern.row_ptr().begin(), pattern.row_ptr().end()),
                  std::vector<std::size_t>(pattern.col_idx().begin(), pattern.col_idx().end()), std::move(v));

    b.assign(l.size, 0.0);
    auto add_into = [&](std::size_t off, std::span<const double> w, double sc) {
      for (std::size_t i = 0; i < w.size(); ++i) b[off + i] += sc * w[i];
    };
    add_into(l.phi, mass_phase.multiply(prev.phi), 1.0);
    add_into(l.u, mass_u.multiply(prev.u), 1.0);
    add_into(l.B, mass_B.multiply(prev.B), 1.0);
    if (pc.source_phi) add_into(l.phi, assemble_source(s.phase, pc.source_phi, t_next), dt);
    if (pc.source_u) add_into(l.u, assemble_source(s.velocity, pc.source_u, t_next), dt);
    if (pc.source_B) add_into(l.B, assemble_source(s.magnetic, pc.source_B, t_next), dt);

    bc = step_constraints(s, pc.bc, t_next);
    bc_dofs = bc.dofs();
    bc_values = bc.values();
  }

  std::span<const double> phi_of(std::span<const double> x) const { return x.subspan(l.phi, s.phase.n_dofs()); }

  // J = A + cubic Jacobian at phi_iter, essential rows replaced.
  // J = A + cubic Jacobian, essential rows replaced.
  void jacobian(const CubicTerm& ct, CsrMatrix& j) const {
    if (j.nnz() != a.nnz()) j = a;
    std::copy(a.values().begin(), a.values().end(), j.values().begin());
    scatter(j.values(), ct.jacobian.matrix, map_cubic, 1.0);
    std::vector<double> dummy(l.size, 0.0);
    bc.apply(j, dummy);
  }

  CubicTerm cubic_at(const StateFields& prev, std::span<const double> phi_iter) const {
    return cubic_term(s.phase, phi_iter, prev.phi, 1.0 / prm.gamma);
  }

  // Linear system for the full next iterate: J x = J x_iter - R(x_iter).
  StepSystem linearize(const StateFields& prev, std::span<const double> phi_iter) const {
    const CubicTerm ct = cubic_at(prev, phi_iter);
    StepSystem sys{a, b};
    jacobian(ct, sys.matrix);
    const std::vector<double> jphi = ct.jacobian.matrix.multiply(phi_iter);
    for (std::size_t i = 0; i < jphi.size(); ++i) sys.rhs[l.omega + i] += jphi[i] - ct.residual[i];
    const auto dofs = bc.dofs();
    const auto vals = bc.values();
    for (std::size_t k = 0; k < dofs.size(); ++k) sys.rhs[dofs[k]] = vals[k];
    return sys;
  }

  std::vector<double> residual_of(std::span<const double> x, const CubicTerm& ct) const {
    std::vector<double> r = a.multiply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    for (std::size_t i = 0; i < ct.residual.size(); ++i) r[l.omega + i] += ct.residual[i];
    for (std::size_t k = 0; k < bc_dofs.size(); ++k) r[bc_dofs[k]] = x[bc_dofs[k]] - bc_values[k];
    return r;
  }

  std::vector<double> residual_of(const StateFields& prev, std::span<const double> x) const {
    return residual_of(x, cubic_at(prev, phi_of(x)));
  }

  double rhs_norm() const {
    std::vector<double> full = b;
    const auto dofs = bc.dofs();
    const auto vals = bc.values();
    for (std::size_t k = 0; k < dofs.size(); ++k) full[dofs[k]] = vals[k];
    return norm2(full);
  }

  // Newton's method. Each linear solve runs GMRES preconditioned by the last LU
  // factor, which is carried across iterations and time levels and refreshed when
  // GMRES needs more than kKrylovLimit iterations. The linear tolerance tracks the
  // distance to the nonlinear target, never finer than lin_tol.
  static constexpr int kKrylovLimit = 12;
  static constexpr double kMaxForcing = 1e-2;

  StateFields step(const StateFields& prev, double t_next, StepReport* report) {
    prepare(prev, t_next);
    std::vector<double> x = pack(s, prev);
    x[l.mult] = 0.0;
    {
      const auto dofs = bc.dofs();
      const auto vals = bc.values();
      for (std::size_t k = 0; k < dofs.size(); ++k) x[dofs[k]] = vals[k];
    }
    const double scale = 1.0 + rhs_norm();
    const double target = prm.newton_tol * scale;
    CubicTerm ct = cubic_at(prev, phi_of(x));
    std::vector<double> r = residual_of(x, ct);
    double res = norm2(r);
    int it = 0, factorizations = 0, krylov = 0;
    double res_before = res, eta_before = kMaxForcing;
    bool converged = false;
    while (it < prm.newton_max) {
      jacobian(ct, j_work);
      for (double& v : r) v = -v;
      // Forcing term: quadratic in the last residual reduction, safeguarded, and
      // never finer than the nonlinear target needs.
      double eta = kMaxForcing;
      if (it > 0) {
        eta = 0.9 * (res / res_before) * (res / res_before);
        if (0.9 * eta_before * eta_before > 0.1) eta = std::max(eta, 0.9 * eta_before * eta_before);
      }
      eta = std::clamp(std::max(eta, 0.5 * target / res), prm.lin_tol, kMaxForcing);
      eta_before = eta;
      res_before = res;
      std::vector<double> dx;
      int k = 0;
      const bool done = solver.factored() && solver.solve_preconditioned(j_work, r, dx, eta, kKrylovLimit, &k);
      krylov += k;
      if (!done) {
        solver.factorize(j_work);
        ++factorizations;
        dx = solver.solve(r, prm.lin_tol);
      }
      ++it;
      std::vector<double> next(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) next[i] = x[i] + dx[i];
      CubicTerm next_ct = cubic_at(prev, phi_of(next));
      std::vector<double> next_r = residual_of(next, next_ct);
      double next_res = norm2(next_r);
      // Halve the update while it increases the residual.
      double theta = 1.0;
      for (int h = 0; h < 5 && next_res > res; ++h) {
        theta *= 0.5;
        std::vector<double> trial(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + theta * dx[i];
        CubicTerm trial_ct = cubic_at(prev, phi_of(trial));
        std::vector<double> trial_r = residual_of(trial, trial_ct);
        const double trial_res = norm2(trial_r);
        if (trial_res < next_res) {
          next = std::move(trial);
          next_ct = std::move(trial_ct);
          next_r = std::move(trial_r);
          next_res = trial_res;
        }
      }
      x = std::move(next);
      ct = std::move(next_ct);
      r = std::move(next_r);
      res = next_res;
      if (!std::isfinite(res)) break;
      if (res <= target) {
        converged = true;
        break;
      }
    }
    if (report) *report = {it, factorizations, krylov, res, scale - 1.0};
    if (!converged) {
      throw NonConvergence("Newton iteration did not converge at t = " + std::to_string(t_next) + " (residual " +
                               std::to_string(res) + " after " + std::to_string(it) + " iterations)",
                           it, res);
    }
    StateFields out = unpack(s, x, t_next, prev.k + 1);
    const double area = std::accumulate(mass_p.begin(), mass_p.end(), 0.0);
    double mean = 0.0;
    for (std::size_t i = 0; i < out.p.size(); ++i) mean += mass_p[i] * out.p[i];
    mean /= area;
    for (double& v : out.p) v -= mean;
    return out;
  }
};

StepSolver::StepSolver(const ProblemSpaces& spaces, const ProblemCase& pc, const SchemeParams& params)
    : impl_(std::make_unique<Impl>(spaces, pc, params)) {}
StepSolver::~StepSolver() = default;
StepSolver::StepSolver(StepSolver&&) noexcept = default;
StepSolver& StepSolver::operator=(StepSolver&&) noexcept = default;

StepSystem StepSolver::assemble(const StateFields& prev, std::span<const double> phi_iter, double t_next) {
  TPMHD_REQUIRE(phi_iter.size() == impl_->s.phase.n_dofs(), InvalidArgument, "phase iterate has the wrong size");
  impl_->prepare(prev, t_next);
  return impl_->linearize(prev, phi_iter);
}

std::vector<double> StepSolver::residual(const StateFields& prev, std::span<const double> x, double t_next) {
  TPMHD_REQUIRE(x.size() == impl_->l.size, InvalidArgument, "iterate has the wrong size");
  impl_->prepare(prev, t_next);
  return impl_->residual_of(prev, x);
}

StateFields StepSolver::step(const StateFields& prev, double t_next, StepReport* report) {
  return impl_->step(prev, t_next, report);
}

StepSystem assemble_step_system(const ProblemSpaces& s, const ProblemCase& pc, const SchemeParams& params,
                                const StateFields& prev, std::span<const double> phi_iter, double t_next) {
  StepSolver solver(s, pc, params);
  return solver.assemble(prev, phi_iter, t_next);
}

StateFields newton_solve_step(const ProblemSpaces& s, const ProblemCase& pc, const SchemeParams& params,
                              const StateFields& prev, double t_next, StepReport* report) {
  StepSolver solver(s, pc, params);
  return solver.step(prev, t_next, report);
}

std::size_t step_count(const SchemeParams& params) {
  params.validate();
  const double k = std::round(params.t_final / params.dt);
  TPMHD_REQUIRE(k >= 1.0, InvalidArgument, "final time is shorter than one step");
  return static_cast<std::size_t>(k);
}

StateFields run(const ProblemSpaces& s, const ProblemCase& pc, const SchemeParams& params,
                const StepObserver& observer) {
  const std::size_t steps = step_count(params);
  StateFields x = initialize(s, pc, params);
  StepSolver solver(s, pc, params);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k) * params.dt;
    StepInfo info{k, t, {}};
    try {
      x = solver.step(x, t, &info.report);
    } catch (const NonConvergence& e) {
      throw NonConvergence("step " + std::to_string(k) + ": " + e.what(), e.iterations(), e.residual());
    } catch (const LinearSolveError& e) {
      throw LinearSolveError("step " + std::to_string(k) + ": " + e.what(), e.residual());
    }
    if (observer) observer(x, info);
  }
  return x;
}

}  // namespace tpmhd
