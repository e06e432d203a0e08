#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "cases.hpp"
#include "projections.hpp"
#include "sparse.hpp"
#include "state.hpp"

namespace tpmhd {

// Mesh with cells_per_side n (periodic when the case asks for it) and the case's space pairing.
ProblemSpaces make_problem_spaces(const ProblemCase& pc, std::size_t n);

// Offsets of the blocks [phi | omega | u | p | B | multiplier] in the monolithic vector.
struct BlockLayout {
  std::size_t phi = 0, omega = 0, u = 0, p = 0, B = 0, mult = 0, size = 0;
  explicit BlockLayout(const ProblemSpaces& s);
};

std::vector<double> pack(const ProblemSpaces& s, const StateFields& x);
StateFields unpack(const ProblemSpaces& s, std::span<const double> v, double t, std::size_t k);

// Constrained DOFs of one vector field, with value(tag, point) supplying the
// data on Dirichlet sides. Normal-zero sides are fixed to zero.
EssentialConstraints field_constraints(const FeSpace& space, const FieldBc& bc,
                                       const std::function<Vec2(BoundaryTag, Point2)>& value);

// Essential conditions of the whole step system at time t.
EssentialConstraints step_constraints(const ProblemSpaces& s, const BcSpec& bc, double t);

// phi by Ritz projection, u by L2 projection, B by Maxwell projection with the
// constrained sides of B taking the trace of B0; omega interpolated when known, p zero.
StateFields initialize(const ProblemSpaces& s, const ProblemCase& pc, const SchemeParams& params);

struct StepSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
};

struct StepReport {
  int newton_iterations = 0;  // linear solves
  int factorizations = 0;
  int krylov_iterations = 0;
  double residual = 0.0;
  double rhs_norm = 0.0;
};

// One time level of the scheme. The monolithic sparsity pattern is built once and
// reused, so the direct solver's symbolic analysis carries over between solves.
class StepSolver {
 public:
  StepSolver(const ProblemSpaces& spaces, const ProblemCase& pc, const SchemeParams& params);
  ~StepSolver();
  StepSolver(StepSolver&&) noexcept;
  StepSolver& operator=(StepSolver&&) noexcept;

  // Linearization at phi_iter for the full next iterate, essential rows replaced.
  StepSystem assemble(const StateFields& prev, std::span<const double> phi_iter, double t_next);

  // Nonlinear residual of the step equations at the packed iterate x, with
  // constrained rows measuring x - data.
  std::vector<double> residual(const StateFields& prev, std::span<const double> x, double t_next);

  // Advances prev to t_next; p is returned with zero mean.
  StateFields step(const StateFields& prev, double t_next, StepReport* report = nullptr);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

StepSystem assemble_step_system(const ProblemSpaces& s, const ProblemCase& pc, const SchemeParams& params,
                                const StateFields& prev, std::span<const double> phi_iter, double t_next);

StateFields newton_solve_step(const ProblemSpaces& s, const ProblemCase& pc, const SchemeParams& params,
                              const StateFields& prev, double t_next, StepReport* report = nullptr);

struct StepInfo {
  std::size_t step = 0;  // 1-based
  double t = 0.0;
  StepReport report;
};

using StepObserver = std::function<void(const StateFields&, const StepInfo&)>;

// K = round(T / dt) steps from the initialized state. Step failures are rethrown
// with the step index in the message.
StateFields run(const ProblemSpaces& s, const ProblemCase& pc, const SchemeParams& params,
                const StepObserver& observer = {});

std::size_t step_count(const SchemeParams& params);

}  // namespace tpmhd
