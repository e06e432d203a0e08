#include "state.hpp"

namespace tpmhd {

const char* to_string(Pairing pairing) { return pairing == Pairing::I ? "I" : "II"; }

std::size_t ProblemSpaces::total_unknowns() const {
  return 2 * phase.n_dofs() + velocity.n_dofs() + pressure.n_dofs() + magnetic.n_dofs() + 1;
}

ProblemSpaces make_problem_spaces(std::shared_ptr<const Mesh> mesh, Pairing pairing) {
  const ElementFamily vel = pairing == Pairing::I ? ElementFamily::P1Bubble : ElementFamily::P2;
  const ElementFamily mag = pairing == Pairing::I ? ElementFamily::P1 : ElementFamily::P2;
  return {mesh, make_space(mesh, ElementFamily::P1), make_space(mesh, vel, 2), make_space(mesh, ElementFamily::P1),
          make_space(mesh, mag, 2)};
}

StateFields StateFields::zeros(const ProblemSpaces& s) {
  StateFields out;
  out.phi.assign(s.phase.n_dofs(), 0.0);
  out.omega.assign(s.phase.n_dofs(), 0.0);
  out.u.assign(s.velocity.n_dofs(), 0.0);
  out.p.assign(s.pressure.n_dofs(), 0.0);
  out.B.assign(s.magnetic.n_dofs(), 0.0);
  return out;
}

}  // namespace tpmhd
