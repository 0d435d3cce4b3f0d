#pragma once

#include <string>
#include <vector>

#include "infogeo/quantum_geometry.hpp"

namespace infogeo {

/// Divided difference exp[x_1, ..., x_n] of the exponential, symmetric in
/// its nodes and valid for repeated nodes. Equals the integral of
/// exp(sum a_k x_k) over the simplex {a_k >= 0, sum a_k = 1}.
double exp_divided_difference(const std::vector<double>& nodes);

inline constexpr int kKuboMaxPoints = 8;

/// Integral over the simplex of Tr[rho^a1 V_1 rho^a2 V_2 ... rho^an V_n].
/// Refuses n > 8.
double kubo_n_point(const DensityMatrix& rho0, const std::vector<HermitianMatrix>& vs);

struct PerturbationProblem {
  HermitianMatrix h0;
  HermitianMatrix v;
  int max_order = 4;  // at most 6
};

struct SeriesReport {
  double exact_log_z;
  /// terms[0] = log Z_0; terms[n] is the order-n coefficient of log Z_{tV}
  /// at t = 1.
  std::vector<double> terms;
  std::vector<double> partial_sums;
  std::vector<double> truncation_errors;
  bool diverged = false;
  /// How the terms were assembled, for output metadata.
  static const char* convention();
};

/// Z_V / Z_0 = 1 + sum_n (-1)^n / n K_n(V, ..., V) from the Duhamel series,
/// then log taken order by order.
SeriesReport expand_log_z(const PerturbationProblem& prob);

struct MassieuDerivativeResidual {
  double first;   // |d/dt log Z_{tV} at 0 + Tr[rho0 V]|
  double second;  // |d^2/dt^2 log Z_{tV} at 0 - bkm(rho0; centered V)|
  double first_fd;
  double second_fd;
};

/// Richardson-extrapolated central differences of t -> log Tr exp(-(H0 + tV)).
MassieuDerivativeResidual massieu_derivative_check(const PerturbationProblem& prob);

}  // namespace infogeo
