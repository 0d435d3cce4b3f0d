#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "infogeo/classical_estimation.hpp"
#include "infogeo/quantum_geometry.hpp"

namespace infogeo {

/// Row-stochastic |Omega| x |Omega'| matrix. States push as rho' = S^T rho,
/// random variables pull back as f = S f'.
class ClassicalStochasticMap {
 public:
  explicit ClassicalStochasticMap(MatrixXd s);
  static ClassicalStochasticMap identity(int n);
  /// Column j of the output receives row perm[j] of the input.
  static ClassicalStochasticMap permutation(const std::vector<int>& perm);

  int rows() const { return static_cast<int>(s_.rows()); }
  int cols() const { return static_cast<int>(s_.cols()); }
  const MatrixXd& matrix() const { return s_; }

 private:
  MatrixXd s_;
};

/// Kraus operators A_k : C^dim -> C^dim_out with sum_k A_k^H A_k = I.
class QuantumCPUnitalMap {
 public:
  explicit QuantumCPUnitalMap(std::vector<MatrixXcd> kraus);
  static QuantumCPUnitalMap unitary(const MatrixXcd& u);
  /// Kraus set {sqrt(1-q) I, sqrt(q/3) sx, sqrt(q/3) sy, sqrt(q/3) sz}.
  static QuantumCPUnitalMap depolarizing_qubit(double q);

  int dim_in() const { return static_cast<int>(k_.front().cols()); }
  int dim_out() const { return static_cast<int>(k_.front().rows()); }
  const std::vector<MatrixXcd>& kraus() const { return k_; }

 private:
  std::vector<MatrixXcd> k_;
};

/// sum_i rho_i S_ij. Boundary states are allowed through.
FiniteDistribution push_state(const ClassicalStochasticMap& s, const FiniteDistribution& rho);
/// S f, a random variable on the input space.
VectorXd push_observable(const ClassicalStochasticMap& s, const VectorXd& f);
/// S^T v for a signed measure.
VectorXd push_mixture(const ClassicalStochasticMap& s, const VectorXd& v);

/// sum_k A_k rho A_k^H.
DensityMatrix push_state(const QuantumCPUnitalMap& f, const DensityMatrix& rho);
/// sum_k A_k^H X A_k.
HermitianMatrix push_observable(const QuantumCPUnitalMap& f, const HermitianMatrix& x);
/// sum_k A_k V A_k^H for a traceless perturbation.
HermitianMatrix push_mixture(const QuantumCPUnitalMap& f, const HermitianMatrix& v);

enum class AuditMetric { fisher, gns, bkm };
const char* to_string(AuditMetric m);
AuditMetric parse_audit_metric(const std::string& s);

/// Metric of a mixture tangent. fisher: sum v^2 / rho.
double mixture_metric(const FiniteDistribution& rho, const VectorXd& v);
/// gns: Re Tr[rho L^2] where v = (rho L + L rho) / 2, i.e. the GNS metric of
/// the symmetric-logarithmic score of v. bkm: Tr[v K(v)] with the
/// log-difference kernel.
double mixture_metric(const DensityMatrix& rho, const HermitianMatrix& v, AuditMetric which);

/// g_{rho'}(v', v') / g_rho(v, v) with v' the pushed mixture tangent.
/// Throws InputError on a zero tangent and DomainError when the pushed
/// state is not faithful.
double audit_metric_contraction(const ClassicalStochasticMap& s, const FiniteDistribution& rho,
                                const ClassicalTangent& x);
double audit_metric_contraction(const QuantumCPUnitalMap& f, const DensityMatrix& rho,
                                const QuantumTangent& x, AuditMetric which);

/// Largest generalized eigenvalue of (G_pushed, G): the worst-case ratio of
/// pushed to original information over parameter directions. Zero when the
/// pushed information vanishes.
double audit_family_info(const ClassicalStochasticMap& s, const ParametricFamily& fam,
                         const VectorXd& theta);

using QuantumFamilyMap = std::function<DensityMatrix(const VectorXd&)>;
/// Information matrix from central-difference state derivatives (h = 1e-5).
MatrixXd quantum_family_info(const QuantumFamilyMap& fam, const VectorXd& theta,
                             AuditMetric which);
double audit_family_info(const QuantumCPUnitalMap& f, const QuantumFamilyMap& fam,
                         const VectorXd& theta, AuditMetric which);

ClassicalStochasticMap random_classical_map(int rows, int cols, std::uint64_t seed);
/// Haar-style isometry from a complex Gaussian matrix orthonormalized by QR,
/// cut into n_kraus blocks of dim_out rows.
QuantumCPUnitalMap random_quantum_map(int dim_in, int dim_out, int n_kraus, std::uint64_t seed);
MatrixXcd random_unitary(int dim, std::uint64_t seed);

struct ContractionReport {
  AuditMetric metric;
  int trials = 0;
  int skipped = 0;
  double worst_violation = 0.0;  // max(ratio - 1) over evaluated trials
  std::vector<double> ratios;
  std::array<std::int64_t, 20> histogram{};  // ratios over [0, 1], overflow in the last bin
};

/// Random (map, state, tangent) triples at input dimension dim. Trial i
/// uses derive_seed(seed, i), so results do not depend on evaluation order.
ContractionReport audit_sweep(AuditMetric which, int dim, int trials, std::uint64_t seed);

}  // namespace infogeo
