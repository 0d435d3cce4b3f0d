#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "infogeo/classical_geometry.hpp"
#include "infogeo/spectral.hpp"

namespace infogeo {

/// Faithful density matrix: Hermitian, trace one, positive definite. The
/// spectral decomposition is computed once at construction.
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianMatrix m, Boundary boundary = Boundary::reject);
  static DensityMatrix normalized(const HermitianMatrix& m, Boundary boundary = Boundary::reject);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return m_.dim(); }
  const HermitianMatrix& matrix() const { return m_; }
  const MatrixXcd& mat() const { return m_.mat(); }
  const SpectralDecomposition& spectral() const { return spec_; }
  const VectorXd& eigenvalues() const { return spec_.eigenvalues; }
  /// Re Tr[rho X]
  double expectation(const HermitianMatrix& x) const { return trace_product(m_, x); }

 private:
  HermitianMatrix m_;
  SpectralDecomposition spec_;
};

enum class QuantumRep { mixture, score };

/// mixture: traceless perturbation of the state. score: observable with
/// zero mean in the base state.
struct QuantumTangent {
  QuantumRep rep;
  HermitianMatrix matrix;
};

/// X - Tr[rho X] I, the gauge-fixed score of X.
QuantumTangent make_score(const DensityMatrix& rho, const HermitianMatrix& x);
/// X - Tr[X]/d I as a mixture tangent.
QuantumTangent make_mixture(const HermitianMatrix& x);

/// rho = exp(-(H0 + sum_j xi_j F_j)) / Z.
class QuantumExponentialFamily {
 public:
  QuantumExponentialFamily(HermitianMatrix h0, std::vector<HermitianMatrix> features);

  int dim() const { return h0_.dim(); }
  int size() const { return static_cast<int>(f_.size()); }
  const HermitianMatrix& h0() const { return h0_; }
  const std::vector<HermitianMatrix>& features() const { return f_; }
  HermitianMatrix hamiltonian(const VectorXd& xi) const;

 private:
  HermitianMatrix h0_;
  std::vector<HermitianMatrix> f_;
};

DensityMatrix state_from_score(const QuantumExponentialFamily& fam, const VectorXd& xi);
/// log Tr exp(-(H0 + sum xi F)).
double quantum_massieu(const QuantumExponentialFamily& fam, const VectorXd& xi);
/// log Tr exp(-H), evaluated with a spectral shift.
double log_partition(const HermitianMatrix& h);
/// Tr[rho F_j]
VectorXd quantum_means(const QuantumExponentialFamily& fam, const DensityMatrix& rho);

// -- metrics ------------------------------------------------------------------

/// Re Tr[rho X Y] on scores.
double gns_metric(const DensityMatrix& rho, const QuantumTangent& x, const QuantumTangent& y);
/// int_0^1 Tr[rho^a X rho^(1-a) Y] da on scores, through the logarithmic-mean kernel.
double bkm_metric(const DensityMatrix& rho, const QuantumTangent& x, const QuantumTangent& y);
/// BKM Gram matrix of the centered operators; the Hessian of log Z.
MatrixXd bkm_covariance(const DensityMatrix& rho, const std::vector<HermitianMatrix>& ops);

/// score -> mixture via X_m = K_rho(X_e) with the logarithmic-mean kernel,
/// mixture -> score via its inverse; so bkm_metric(x, y) = Tr[X_m Y_e].
QuantumTangent quantum_tangent_convert(const DensityMatrix& rho, const QuantumTangent& t,
                                       QuantumRep target);

/// +1: score X -> X - Tr[sigma X]. -1: mixture tangent unchanged.
QuantumTangent quantum_parallel_transport(const DensityMatrix& rho, const DensityMatrix& sigma,
                                          const QuantumTangent& t, Connection which);

// -- logarithmic derivatives ----------------------------------------------

using StatePath = std::function<DensityMatrix(double)>;

/// Central difference (rho(t0 + h) - rho(t0 - h)) / 2h, symmetrized and
/// projected onto traceless matrices. Throws DomainError if the raw trace
/// exceeds 1e-8.
HermitianMatrix state_derivative(const StatePath& path, double t0, double h = 1e-5);

struct LogDerivatives {
  MatrixXcd right;  // rho^{-1} d rho, generally not Hermitian
  bool right_is_hermitian;
  HermitianMatrix symmetric;  // SLD, d rho = (rho L + L rho) / 2
  HermitianMatrix bkm;        // d rho = int rho^a L rho^(1-a) da
};

LogDerivatives log_derivatives(const DensityMatrix& rho, const HermitianMatrix& drho);
LogDerivatives log_derivatives(const StatePath& path, double t0);

enum class QuantumInfo { gns_sld, bkm, right };
inline constexpr std::array<QuantumInfo, 3> kAllQuantumInfos{QuantumInfo::gns_sld, QuantumInfo::bkm,
                                                             QuantumInfo::right};
const char* to_string(QuantumInfo which);

/// gns_sld: Re Tr[rho L_s^2]; bkm: Tr[d rho L_B]; right: Tr[rho L_r^H L_r].
double quantum_fisher_info(const DensityMatrix& rho, const HermitianMatrix& drho,
                           QuantumInfo which);
double quantum_fisher_info(const StatePath& path, double t0, QuantumInfo which);

struct QuantumCramerRaoReport {
  double mean;
  double mean_derivative;
  double variance;      // Tr[rho X^2] - Tr[rho X]^2
  double bkm_variance;  // bkm_metric of the centered observable
  std::array<double, 3> info;   // indexed like kAllQuantumInfos
  std::array<double, 3> bound;  // 1 / info
  /// variance - bound for gns_sld and right; bkm_variance - bound for bkm.
  std::array<double, 3> slack;
};

/// Requires d/dt Tr[rho_t X] = 1 at t0 to 1e-6 (local unbiasedness).
QuantumCramerRaoReport quantum_cramer_rao(const StatePath& path, double t0,
                                          const HermitianMatrix& observable);
QuantumCramerRaoReport quantum_cramer_rao(const DensityMatrix& rho, const HermitianMatrix& drho,
                                          const HermitianMatrix& observable);

// -- maximum entropy ----------------------------------------------------------

struct QuantumMaxentOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double armijo_slope = 1e-4;
  double backtrack = 0.5;
  double divergence_radius = 1e3;
  std::optional<VectorXd> initial_xi;
};

struct QuantumMaxentResult {
  VectorXd xi;
  DensityMatrix state;
  double log_z;
  int iterations;
  double residual;
  std::vector<double> objective_trace;
};

/// Damped Newton on log Z(xi) + xi . target with the BKM covariance as Hessian.
QuantumMaxentResult quantum_maxent_fit(const QuantumExponentialFamily& fam,
                                       const VectorXd& target_means,
                                       const QuantumMaxentOptions& opts = {});

/// -Tr[rho log rho], with 0 log 0 = 0.
double quantum_entropy(const DensityMatrix& rho);

/// Same contract as the classical legendre_check, with Phi = S - Tr[rho H0].
LegendreResidual quantum_legendre_check(const QuantumExponentialFamily& fam, const VectorXd& xi,
                                        double h = 1e-5);

struct MixtureEntropyReport {
  double lhs;    // S(lambda rho + (1 - lambda) sigma)
  double rhs;    // lambda S(rho) + (1 - lambda) S(sigma) + h(lambda)
  double slack;  // rhs - lhs
};

/// Boundary states are allowed. Throws InputError unless 0 < lambda < 1.
MixtureEntropyReport mixture_entropy_bound(const DensityMatrix& rho, const DensityMatrix& sigma,
                                           double lambda);

}  // namespace infogeo
