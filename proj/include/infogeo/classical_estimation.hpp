#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "infogeo/classical_geometry.hpp"

namespace infogeo {

/// theta -> distribution, optionally with exact score vectors. Without
/// exact scores, d log rho / d theta is taken by central differences with
/// h = 1e-5 * max(1, |theta_i|).
class ParametricFamily {
 public:
  using Map = std::function<FiniteDistribution(const VectorXd&)>;
  /// Returns the |Omega| x n matrix of scores d log rho / d theta_k.
  using ScoreMap = std::function<MatrixXd(const VectorXd&)>;

  ParametricFamily(int param_dim, Map map, ScoreMap scores = nullptr);

  /// theta = xi.
  static ParametricFamily exponential_canonical(std::shared_ptr<const ExponentialFamily> fam);
  /// theta = eta, the feature means; each evaluation runs maxent_fit.
  static ParametricFamily exponential_mixture(std::shared_ptr<const ExponentialFamily> fam);

  int param_dim() const { return dim_; }
  FiniteDistribution operator()(const VectorXd& theta) const { return map_(theta); }
  bool has_exact_scores() const { return static_cast<bool>(scores_); }
  MatrixXd scores(const VectorXd& theta) const;

 private:
  int dim_;
  Map map_;
  ScoreMap scores_;
};

/// n estimator functions over Omega, stored column-wise.
struct EstimatorSet {
  MatrixXd functions;
  int size() const { return static_cast<int>(functions.cols()); }
};

MatrixXd fisher_information_matrix(const ParametricFamily& fam, const VectorXd& theta);

/// E_theta[f_i] - theta_i.
VectorXd check_unbiased(const ParametricFamily& fam, const VectorXd& theta,
                        const EstimatorSet& est);

struct CramerRaoReport {
  MatrixXd V;
  MatrixXd G;
  MatrixXd gap;  // V - G^{-1}
  double min_gap_eig;
  std::optional<double> efficiency;  // G^{-1} / V, scalar case only
};

/// Requires local unbiasedness at theta: E[f_i] = theta_i and
/// dE[f_i]/dtheta_j = delta_ij, both to 1e-6. Throws DomainError otherwise.
CramerRaoReport cramer_rao_report(const ParametricFamily& fam, const VectorXd& theta,
                                  const EstimatorSet& est);

// -- max-entropy fit --------------------------------------------------------

struct MaxentOptions {
  double tol = 1e-10;         // on ||eta(xi) - target||_inf
  int max_iter = 200;
  double armijo_slope = 1e-4;
  double backtrack = 0.5;
  double divergence_radius = 1e3;
  std::optional<VectorXd> initial_xi;  // warm start; zero otherwise
};

struct MaxentResult {
  CanonicalPoint point;
  int iterations;
  double residual;
  std::vector<double> objective_trace;  // dual objective per accepted iterate
};

/// Damped Newton on the convex dual psi(xi) + xi . target. Throws DomainError
/// for infeasible targets and for non-convergence.
MaxentResult maxent_fit_detailed(std::shared_ptr<const ExponentialFamily> fam,
                                 const VectorXd& target_means, const MaxentOptions& opts = {});
CanonicalPoint maxent_fit(std::shared_ptr<const ExponentialFamily> fam, const VectorXd& target_means,
                          const MaxentOptions& opts = {});

// -- sampling ---------------------------------------------------------------

using Histogram = std::vector<std::int64_t>;

Histogram sample(const FiniteDistribution& rho, std::int64_t m, std::uint64_t seed);

struct EmpiricalDistribution {
  FiniteDistribution dist;
  std::optional<double> smoothing;  // additive epsilon when some cell was empty
};

/// Cell frequencies; when a cell is empty every frequency receives
/// eps = 1 / (m |Omega|) and the result is renormalized.
EmpiricalDistribution empirical_distribution(const Histogram& hist);

/// m-projection of the histogram onto the family: maxent_fit at the
/// empirical feature means.
CanonicalPoint estimate_from_data(std::shared_ptr<const ExponentialFamily> fam,
                                  const Histogram& hist, const MaxentOptions& opts = {});

}  // namespace infogeo
