#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "fespace.hpp"
#include "forms.hpp"

namespace tpmhd {

using TimeTensorFn = std::function<Mat2(Point2, double)>;

// Space pairing: I is MINI (P1 bubble velocity, P1 magnetic), II is P2 velocity and magnetic.
enum class Pairing { I, II };

const char* to_string(Pairing pairing);

// phi and omega share the phase space.
struct ProblemSpaces {
  std::shared_ptr<const Mesh> mesh;
  FeSpace phase;
  FeSpace velocity;
  FeSpace pressure;
  FeSpace magnetic;

  std::size_t total_unknowns() const;  // including the pressure multiplier
};

ProblemSpaces make_problem_spaces(std::shared_ptr<const Mesh> mesh, Pairing pairing);

struct StateFields {
  std::vector<double> phi;
  std::vector<double> omega;
  std::vector<double> u;
  std::vector<double> p;
  std::vector<double> B;
  double t = 0.0;
  std::size_t k = 0;

  static StateFields zeros(const ProblemSpaces& spaces);
};

// Closed-form fields with their gradients. Vector gradients: entry (i, j) = d f_i / d x_j.
struct ExactSolution {
  TimeScalarFn phi;
  TimeVectorFn grad_phi;
  TimeScalarFn omega;
  TimeVectorFn u;
  TimeTensorFn grad_u;
  TimeScalarFn p;
  TimeVectorFn B;
  TimeTensorFn grad_B;
};

}  // namespace tpmhd
