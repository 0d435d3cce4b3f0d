#include "infogeo/classical_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "infogeo/errors.hpp"
#include "infogeo/random.hpp"

namespace infogeo {

namespace {

std::string fmt_vec(const VectorXd& v) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (int i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << "]";
  return os.str();
}

MatrixXd symmetric(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

MatrixXd centered(const MatrixXd& f, const VectorXd& p) {
  const VectorXd mean = f.transpose() * p;
  return f.rowwise() - mean.transpose();
}

MatrixXd weighted_gram(const MatrixXd& a, const MatrixXd& b, const VectorXd& p) {
  return a.transpose() * p.asDiagonal() * b;
}

}  // namespace

// ---------------------------------------------------------------------------
// ParametricFamily

ParametricFamily::ParametricFamily(int param_dim, Map map, ScoreMap scores)
    : dim_(param_dim), map_(std::move(map)), scores_(std::move(scores)) {
  if (dim_ < 1) throw InputError("parametric family needs at least one parameter");
  if (!map_) throw InputError("parametric family without a map");
}

ParametricFamily ParametricFamily::exponential_canonical(
    std::shared_ptr<const ExponentialFamily> fam) {
  return ParametricFamily(
      fam->dim(),
      [fam](const VectorXd& xi) { return CanonicalPoint(fam, xi).to_distribution(); },
      [fam](const VectorXd& xi) {
        const CanonicalPoint pt(fam, xi);
        return MatrixXd(-centered(fam->features(), pt.probs()));
      });
}

ParametricFamily ParametricFamily::exponential_mixture(
    std::shared_ptr<const ExponentialFamily> fam) {
  MaxentOptions opts;
  opts.tol = 1e-12;
  return ParametricFamily(
      fam->dim(),
      [fam, opts](const VectorXd& eta) { return maxent_fit(fam, eta, opts).to_distribution(); },
      [fam, opts](const VectorXd& eta) {
        // d log rho / d eta = (f - eta) V^{-1}, since d xi / d eta = -V^{-1}.
        const CanonicalPoint pt = maxent_fit(fam, eta, opts);
        const MatrixXd c = centered(fam->features(), pt.probs());
        const MatrixXd v = covariance(pt);
        return MatrixXd(v.ldlt().solve(c.transpose()).transpose());
      });
}

MatrixXd ParametricFamily::scores(const VectorXd& theta) const {
  if (theta.size() != dim_) throw InputError("parameter vector has the wrong dimension");
  if (scores_) return scores_(theta);

  const FiniteDistribution base = map_(theta);
  MatrixXd s(base.omega_size(), dim_);
  for (int k = 0; k < dim_; ++k) {
    const double h = 1e-5 * std::max(1.0, std::abs(theta(k)));
    VectorXd up = theta, down = theta;
    up(k) += h;
    down(k) -= h;
    const FiniteDistribution pu = map_(up);
    const FiniteDistribution pd = map_(down);
    if (pu.omega_size() != base.omega_size() || pd.omega_size() != base.omega_size()) {
      throw InputError("parametric family changes sample-space size");
    }
    const double leak = ((pu.probs() - pd.probs()) / (2.0 * h)).sum();
    if (std::abs(leak) > 1e-8) {
      throw InputError("parametric family does not conserve probability (Jacobian column sum " +
                       std::to_string(leak) + ")");
    }
    s.col(k) = (pu.probs().array().log() - pd.probs().array().log()) / (2.0 * h);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Fisher information and Cramer-Rao

namespace {

FiniteDistribution evaluate_interior(const ParametricFamily& fam, const VectorXd& theta) {
  std::optional<FiniteDistribution> rho;
  try {
    rho = fam(theta);
  } catch (const InputError& e) {
    throw DomainError(std::string("family is singular at theta = ") + fmt_vec(theta) + ": " +
                      e.what());
  }
  if (!rho->faithful()) {
    std::ostringstream os;
    os.precision(17);
    os << "family is singular at theta = " << fmt_vec(theta) << ": min probability "
       << rho->probs().minCoeff();
    throw DomainError(os.str());
  }
  return *rho;
}

}  // namespace

MatrixXd fisher_information_matrix(const ParametricFamily& fam, const VectorXd& theta) {
  const FiniteDistribution rho = evaluate_interior(fam, theta);
  const MatrixXd s = fam.scores(theta);
  return symmetric(weighted_gram(s, s, rho.probs()));
}

VectorXd check_unbiased(const ParametricFamily& fam, const VectorXd& theta,
                        const EstimatorSet& est) {
  const FiniteDistribution rho = evaluate_interior(fam, theta);
  if (est.functions.rows() != rho.omega_size()) {
    throw InputError("estimators are defined on a different sample space");
  }
  return est.functions.transpose() * rho.probs() - theta;
}

CramerRaoReport cramer_rao_report(const ParametricFamily& fam, const VectorXd& theta,
                                  const EstimatorSet& est) {
  if (est.size() != fam.param_dim()) {
    throw InputError("cramer_rao_report: need one estimator per parameter");
  }
  const VectorXd bias = check_unbiased(fam, theta, est);
  if (bias.cwiseAbs().maxCoeff() > 1e-6) {
    throw DomainError("estimators are biased at theta: residual " + fmt_vec(bias));
  }
  const FiniteDistribution rho = fam(theta);
  const MatrixXd s = fam.scores(theta);
  const MatrixXd c = centered(est.functions, rho.probs());

  // d E[f_i] / d theta_j = E[f_i score_j] must be the identity.
  const MatrixXd jac = weighted_gram(c, s, rho.probs());
  const double jac_err =
      (jac - MatrixXd::Identity(jac.rows(), jac.cols())).cwiseAbs().maxCoeff();
  if (jac_err > 1e-6) {
    std::ostringstream os;
    os << "estimators are not locally unbiased: d E[f]/d theta deviates from the identity by "
       << jac_err;
    throw DomainError(os.str());
  }

  CramerRaoReport r;
  r.V = symmetric(weighted_gram(c, c, rho.probs()));
  r.G = symmetric(weighted_gram(s, s, rho.probs()));
  Eigen::SelfAdjointEigenSolver<MatrixXd> geig(r.G);
  if (!(geig.eigenvalues()(0) > 1e-14 * std::max(1.0, geig.eigenvalues().maxCoeff()))) {
    throw DomainError("Fisher information is singular at theta = " + fmt_vec(theta));
  }
  const MatrixXd ginv = symmetric(geig.eigenvectors() *
                                  geig.eigenvalues().cwiseInverse().asDiagonal() *
                                  geig.eigenvectors().transpose());
  r.gap = symmetric(r.V - ginv);
  r.min_gap_eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(r.gap).eigenvalues()(0);
  if (fam.param_dim() == 1) r.efficiency = ginv(0, 0) / r.V(0, 0);
  return r;
}

// ---------------------------------------------------------------------------
// max-entropy fit

MaxentResult maxent_fit_detailed(std::shared_ptr<const ExponentialFamily> fam,
                                 const VectorXd& target, const MaxentOptions& opts) {
  if (!fam) throw InputError("maxent_fit: no family");
  const int n = fam->dim();
  if (target.size() != n) throw InputError("maxent_fit: target has the wrong dimension");
  if (!target.allFinite()) throw InputError("maxent_fit: target is not finite");
  for (int j = 0; j < n; ++j) {
    const double lo = fam->features().col(j).minCoeff();
    const double hi = fam->features().col(j).maxCoeff();
    if (!(target(j) > lo && target(j) < hi)) {
      std::ostringstream os;
      os.precision(17);
      os << "maxent_fit: infeasible target, mean of feature " << j << " = " << target(j)
         << " is not inside its range (" << lo << ", " << hi << ")";
      throw DomainError(os.str());
    }
  }

  VectorXd xi = opts.initial_xi.value_or(VectorXd::Zero(n));
  if (xi.size() != n) throw InputError("maxent_fit: warm start has the wrong dimension");

  auto objective = [&](const CanonicalPoint& pt) { return pt.psi() + pt.xi().dot(target); };

  CanonicalPoint pt(fam, xi);
  double obj = objective(pt);
  std::vector<double> trace{obj};
  double residual = 0.0;
  int polish = 0;

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    const VectorXd r = mixture_coords(pt) - target;
    residual = r.cwiseAbs().maxCoeff();
    const bool converged = residual < opts.tol;
    // Two extra Newton steps past tolerance take the residual to rounding
    // level at negligible cost; callers differentiate through the fit.
    if (converged && polish >= 2) return {pt, iter, residual, trace};
    if (iter == opts.max_iter) break;
    if (pt.xi().cwiseAbs().maxCoeff() > opts.divergence_radius) {
      throw DomainError("maxent_fit: infeasible or boundary target, |xi| exceeded " +
                        std::to_string(opts.divergence_radius) + " with residual " +
                        std::to_string(residual) + "; divergence direction " +
                        fmt_vec(pt.xi().normalized()));
    }

    const MatrixXd v = covariance(pt);
    const VectorXd dir = v.ldlt().solve(r);
    const double slope = -r.dot(dir);  // grad . dir, gradient = -r
    if (converged) {
      CanonicalPoint trial(fam, pt.xi() + dir);
      const double tres = (mixture_coords(trial) - target).cwiseAbs().maxCoeff();
      ++polish;
      if (tres < residual) {
        pt = trial;
        obj = objective(pt);
        trace.push_back(obj);
      } else {
        return {pt, iter, residual, trace};
      }
      continue;
    }

    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      CanonicalPoint trial(fam, pt.xi() + step * dir);
      const double tobj = objective(trial);
      // Near the optimum the objective decrease drops below rounding; fall
      // back to the residual for the full step.
      const bool sufficient =
          tobj <= obj + opts.armijo_slope * step * slope ||
          (bt == 0 && (mixture_coords(trial) - target).cwiseAbs().maxCoeff() < 0.5 * residual);
      if (std::isfinite(tobj) && sufficient) {
        pt = trial;
        obj = tobj;
        trace.push_back(obj);
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted) {
      throw DomainError("maxent_fit: line search stalled with residual " +
                        std::to_string(residual));
    }
  }
  std::ostringstream os;
  os << "maxent_fit: Newton did not converge in " << opts.max_iter
     << " iterations, final residual " << residual;
  throw DomainError(os.str());
}

CanonicalPoint maxent_fit(std::shared_ptr<const ExponentialFamily> fam, const VectorXd& target,
                          const MaxentOptions& opts) {
  return maxent_fit_detailed(std::move(fam), target, opts).point;
}

// ---------------------------------------------------------------------------
// sampling

Histogram sample(const FiniteDistribution& rho, std::int64_t m, std::uint64_t seed) {
  if (m < 1) throw InputError("sample: need m >= 1");
  std::vector<double> cdf(rho.omega_size());
  double acc = 0.0;
  for (int i = 0; i < rho.omega_size(); ++i) cdf[i] = (acc += rho(i));
  cdf.back() = 1.0;

  std::mt19937_64 eng(seed);
  Histogram hist(rho.omega_size(), 0);
  for (std::int64_t k = 0; k < m; ++k) {
    const double u = uniform01(eng);
    const auto idx = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    ++hist[std::min<std::ptrdiff_t>(idx, rho.omega_size() - 1)];
  }
  return hist;
}

EmpiricalDistribution empirical_distribution(const Histogram& hist) {
  if (hist.empty()) throw InputError("empirical_distribution: empty histogram");
  std::int64_t m = 0;
  bool has_empty = false;
  for (auto h : hist) {
    if (h < 0) throw InputError("empirical_distribution: negative count");
    m += h;
    has_empty = has_empty || h == 0;
  }
  if (m == 0) throw InputError("empirical_distribution: histogram has no samples");
  const int omega = static_cast<int>(hist.size());
  VectorXd freq(omega);
  for (int i = 0; i < omega; ++i) freq(i) = static_cast<double>(hist[i]) / static_cast<double>(m);
  if (!has_empty) return {FiniteDistribution::normalized(freq), std::nullopt};
  const double eps = 1.0 / (static_cast<double>(m) * omega);
  return {FiniteDistribution::normalized(freq.array() + eps), eps};
}

CanonicalPoint estimate_from_data(std::shared_ptr<const ExponentialFamily> fam,
                                  const Histogram& hist, const MaxentOptions& opts) {
  if (static_cast<int>(hist.size()) != fam->omega_size()) {
    throw InputError("estimate_from_data: histogram size differs from |Omega|");
  }
  VectorXd counts(fam->omega_size());
  for (int i = 0; i < fam->omega_size(); ++i) counts(i) = static_cast<double>(hist[i]);
  const double m = counts.sum();
  if (!(m > 0.0)) throw InputError("estimate_from_data: histogram has no samples");
  return maxent_fit(fam, fam->features().transpose() * counts / m, opts);
}

}  // namespace infogeo
