#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "state.hpp"

namespace tpmhd {

struct EnergyReport {
  double energy = 0.0;
  double diss_omega = 0.0;  // ||grad omega||^2
  double diss_u = 0.0;      // ||grad u||^2
  double diss_curlB = 0.0;  // ||curl B||^2
  double diss_divB = 0.0;   // ||div B||^2
};

// lambda (gamma/2 ||grad phi||^2 + 1/gamma int F(phi)) + 1/2 ||u||^2 + 1/(2 mu) ||B||^2,
// F(s) = (s^2 - 1)^2 / 4.
EnergyReport energy(const ProblemSpaces& spaces, const StateFields& state, const SchemeParams& params);

// Integral of a scalar field.
double total_mass(const FeSpace& space, std::span<const double> coeffs);

double l2_error(const FeSpace& space, std::span<const double> coeffs, const ScalarFn& exact);
double l2_error_vector(const FeSpace& space, std::span<const double> coeffs, const VectorFn& exact);
double h1semi_error(const FeSpace& space, std::span<const double> coeffs, const GradientFn& exact);
double h1semi_error_vector(const FeSpace& space, std::span<const double> coeffs, const TensorFn& exact);
double curl_error(const FeSpace& space, std::span<const double> coeffs, const TensorFn& exact);
double div_error(const FeSpace& space, std::span<const double> coeffs, const TensorFn& exact);

struct ErrorReport {
  double l2_phi = 0.0;
  double h1semi_phi = 0.0;
  double l2_omega = 0.0;
  double l2_u = 0.0;
  double h1semi_u = 0.0;
  double l2_p = 0.0;
  double l2_B = 0.0;
  double h1semi_B = 0.0;
  double curl_B = 0.0;
  double div_B = 0.0;

  static constexpr std::size_t kCount = 10;
  static const std::array<const char*, kCount>& names();
  std::array<double, kCount> values() const;
};

// The exact pressure is compared after removing its mean, since p_h has zero mean.
ErrorReport error_norms(const ProblemSpaces& spaces, const StateFields& state, const ExactSolution& exact, double t);

struct RateRow {
  double h = 0.0;
  double dt = 0.0;
  std::array<double, ErrorReport::kCount> errors{};
  std::array<std::optional<double>, ErrorReport::kCount> rates{};
};

struct RateInput {
  double h;
  double dt;
  ErrorReport errors;
};

// rate = log(e_prev / e_cur) / log(h_prev / h_cur). Requires strictly decreasing h.
std::vector<RateRow> rate_table(std::span<const RateInput> rows);

double observed_rate(double e_coarse, double e_fine, double h_coarse, double h_fine);

}  // namespace tpmhd
