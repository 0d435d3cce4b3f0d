#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "infogeo/classical_estimation.hpp"
#include "infogeo/monotonicity.hpp"
#include "infogeo/quantum_geometry.hpp"

namespace infogeo {

/// Rate matrix Q acting on column distributions, d rho / dt = Q rho.
/// Off-diagonals are nonnegative and columns sum to zero.
class MarkovGenerator {
 public:
  explicit MarkovGenerator(MatrixXd q);
  int size() const { return static_cast<int>(q_.rows()); }
  const MatrixXd& rates() const { return q_; }
  /// exp(dt Q), a column-stochastic matrix.
  MatrixXd propagator(double dt) const;

 private:
  MatrixXd q_;
};

/// Unitary step exp(-i H dt) rho exp(i H dt), or a fixed channel per step.
struct HamiltonianStep {
  HermitianMatrix h;
};
using QuantumStepMap = std::variant<HamiltonianStep, QuantumCPUnitalMap>;

FiniteDistribution micro_step(const FiniteDistribution& rho, const MarkovGenerator& q, double dt);
DensityMatrix micro_step(const DensityMatrix& rho, const QuantumStepMap& step, double dt);

struct ProjectionRecord {
  double t;
  VectorXd xi;
  VectorXd eta;              // means of the projected state
  double entropy;            // entropy of the projected state
  double pre_entropy;        // entropy of the state before projection
  double projection_defect;  // relative entropy of the pre-projection state to its projection
  double mean_residual;      // max |eta - means before projection|
  int newton_iterations;
  VectorXd probs;            // classical runs
  MatrixXcd rho;             // quantum runs
};

struct ProjectionRun {
  double dt;
  int steps;
  std::vector<ProjectionRecord> trajectory;
  bool truncated = false;
  std::string diagnostic;
  /// Projection kind, for output metadata.
  static const char* projection();
};

/// Rolling construction: project the initial state, then repeat
/// micro_step followed by moment-matching projection onto the family.
/// Each fit is warm-started from the previous xi. An infeasible projection
/// or a step that leaves the faithful interior truncates the run.
ProjectionRun roll(const FiniteDistribution& initial, const MarkovGenerator& q,
                   std::shared_ptr<const ExponentialFamily> family, double dt, int steps,
                   const MaxentOptions& fit = {});
ProjectionRun roll(const DensityMatrix& initial, const QuantumStepMap& step,
                   const QuantumExponentialFamily& family, double dt, int steps,
                   const QuantumMaxentOptions& fit = {});

/// Entropy of the projected state at each record.
std::vector<double> entropy_production(const ProjectionRun& run);

}  // namespace infogeo
