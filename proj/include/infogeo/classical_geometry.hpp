#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace infogeo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// States with min probability below this are rejected unless the caller
/// passes Boundary::allow.
inline constexpr double kFaithfulFloor = 1e-14;

enum class Boundary { reject, allow };

/// Strictly positive probability vector over a finite sample space.
class FiniteDistribution {
 public:
  explicit FiniteDistribution(VectorXd probs, Boundary boundary = Boundary::reject);

  /// Divides by the sum first; for vectors known only up to normalization.
  static FiniteDistribution normalized(const VectorXd& weights,
                                       Boundary boundary = Boundary::reject);
  static FiniteDistribution uniform(int omega_size);

  int omega_size() const { return static_cast<int>(p_.size()); }
  const VectorXd& probs() const { return p_; }
  double operator()(int w) const { return p_(w); }
  double expectation(const VectorXd& f) const;
  bool faithful() const { return p_.minCoeff() > kFaithfulFloor; }

 private:
  VectorXd p_;
};

/// Exponential family rho_xi(w) = exp(b(w) - sum_j xi_j f_j(w)) / Z.
/// Features are stored column-wise: features(w, j) = f_j(w).
class ExponentialFamily {
 public:
  ExponentialFamily(MatrixXd features, std::optional<VectorXd> base_log_density = std::nullopt);

  int omega_size() const { return static_cast<int>(f_.rows()); }
  int dim() const { return static_cast<int>(f_.cols()); }
  const MatrixXd& features() const { return f_; }
  const VectorXd& base_log_density() const { return b_; }

  /// Family with features scaled column-wise.
  ExponentialFamily rescaled(const VectorXd& scale) const;

 private:
  MatrixXd f_;
  VectorXd b_;
};

/// A point of an exponential family in canonical coordinates, with the
/// Massieu value psi = log Z and the probabilities cached.
class CanonicalPoint {
 public:
  CanonicalPoint(std::shared_ptr<const ExponentialFamily> family, VectorXd xi);

  const ExponentialFamily& family() const { return *family_; }
  std::shared_ptr<const ExponentialFamily> family_ptr() const { return family_; }
  const VectorXd& xi() const { return xi_; }
  double psi() const { return psi_; }
  const VectorXd& probs() const { return probs_; }
  FiniteDistribution to_distribution(Boundary boundary = Boundary::reject) const;

 private:
  std::shared_ptr<const ExponentialFamily> family_;
  VectorXd xi_;
  double psi_ = 0.0;
  VectorXd probs_;
};

enum class TangentRep { mixture, exponential };

/// Tangent vector on the simplex. Mixture rep: zero-sum signed measure.
/// Exponential rep: score with zero mean in the base state.
struct ClassicalTangent {
  TangentRep rep;
  VectorXd vec;
};

// -- metric and tangent pictures -------------------------------------------

ClassicalTangent tangent_convert(const FiniteDistribution& rho, const ClassicalTangent& t,
                                 TangentRep target);

/// sum_w rho(w) x(w) y(w) with both tangents taken in score form.
double fisher_metric(const FiniteDistribution& rho, const ClassicalTangent& x,
                     const ClassicalTangent& y);

// -- Massieu function and its derivatives ----------------------------------

double massieu(const CanonicalPoint& pt);
/// eta_j = E[f_j]
VectorXd mixture_coords(const CanonicalPoint& pt);
/// Covariance of the features; equals the Hessian of psi and the Fisher
/// matrix in canonical coordinates.
MatrixXd covariance(const CanonicalPoint& pt);

/// -sum p log p, with 0 log 0 = 0.
double entropy(const FiniteDistribution& rho);

struct LegendreResidual {
  double value;     // |Phi - (psi + xi . eta)|
  double gradient;  // max_j |dPhi/deta_j - xi_j| by central differences
};

/// Checks the Legendre pair at pt. Phi is the entropy relative to the base
/// measure exp(b), Phi = S + E[b]; it equals S for the uniform base.
LegendreResidual legendre_check(const CanonicalPoint& pt, double h = 1e-5);

// -- sphere embeddings ------------------------------------------------------

/// w -> rho(w)^((1 - alpha) / 2). alpha = 1 is rejected.
VectorXd alpha_embed(const FiniteDistribution& rho, double alpha);
/// Chordal distance || sqrt(rho) - sqrt(sigma) ||_2.
double hellinger_distance(const FiniteDistribution& rho, const FiniteDistribution& sigma);
/// Great-circle angle arccos(sum sqrt(rho sigma)) between root densities.
double bhattacharyya_angle(const FiniteDistribution& rho, const FiniteDistribution& sigma);

// -- alpha connections ------------------------------------------------------

/// Rank-3 symmetric tensor stored as n matrices: t[k](i, j).
using Tensor3 = std::vector<MatrixXd>;

/// Third central moment E[(f_i - eta_i)(f_j - eta_j)(f_k - eta_k)].
Tensor3 skewness_tensor(const CanonicalPoint& pt);
/// Gamma^k_ij of the alpha connection in canonical coordinates, stored as
/// gamma[k](i, j).
Tensor3 christoffel(const CanonicalPoint& pt, double alpha);

struct GeodesicOptions {
  double box = 50.0;  // |xi|_inf limit
};

struct GeodesicPath {
  std::vector<double> t;
  std::vector<CanonicalPoint> points;
  bool truncated = false;
};

/// Fixed-step RK4 on x'' + Gamma(x', x') = 0 in canonical coordinates.
GeodesicPath geodesic(const CanonicalPoint& start, const VectorXd& velocity, double alpha,
                      double t_max, double dt = 1e-3, GeodesicOptions opts = {});

enum class Connection { plus, minus };

/// plus: score x -> x - E_sigma[x]. minus: mixture tangent kept as is.
/// The result is in the representation native to the connection.
ClassicalTangent parallel_transport(const FiniteDistribution& rho, const FiniteDistribution& sigma,
                                    const ClassicalTangent& t, Connection which);

}  // namespace infogeo
