#include "infogeo/quantum_geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "infogeo/errors.hpp"

namespace infogeo {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require_dim(int a, int b, const char* where) {
  if (a != b) {
    std::ostringstream os;
    os << where << ": dimension mismatch (" << a << " vs " << b << ")";
    throw InputError(os.str());
  }
}

const HermitianMatrix& require_score(const DensityMatrix& rho, const QuantumTangent& t,
                                     const char* where) {
  require_dim(rho.dim(), t.matrix.dim(), where);
  if (t.rep != QuantumRep::score) {
    throw InputError(std::string(where) + ": expected a score-representation tangent");
  }
  const double mean = rho.expectation(t.matrix);
  if (std::abs(mean) > 1e-9 * std::max(1.0, t.matrix.frobenius_norm())) {
    throw InputError(std::string(where) + ": tangent is not a score at rho (mean " + fmt(mean) +
                     ")");
  }
  return t.matrix;
}

HermitianMatrix traceless(const HermitianMatrix& x) {
  return x - HermitianMatrix::identity(x.dim()) * (x.trace() / x.dim());
}

double binary_entropy(double lambda) {
  return -lambda * std::log(lambda) - (1.0 - lambda) * std::log1p(-lambda);
}

double entropy_of_spectrum(const VectorXd& p) {
  double s = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) s -= p(i) * std::log(p(i));
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(HermitianMatrix m, Boundary boundary)
    : m_(std::move(m)), spec_(eigh(m_)) {
  const double tr = m_.trace();
  if (std::abs(tr - 1.0) > 1e-12) throw InputError("density matrix has trace " + fmt(tr));
  const double pmin = spec_.eigenvalues(0);
  if (boundary == Boundary::reject && !(pmin > kFaithfulFloor)) {
    throw InputError("density matrix is not faithful: min eigenvalue " + fmt(pmin));
  }
  if (pmin < -1e-12) throw InputError("density matrix has negative eigenvalue " + fmt(pmin));
}

DensityMatrix DensityMatrix::normalized(const HermitianMatrix& m, Boundary boundary) {
  const double tr = m.trace();
  if (!(tr > 0.0)) throw InputError("cannot normalize a matrix with trace " + fmt(tr));
  return DensityMatrix(m * (1.0 / tr), boundary);
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(HermitianMatrix::identity(dim) * (1.0 / dim));
}

QuantumTangent make_score(const DensityMatrix& rho, const HermitianMatrix& x) {
  require_dim(rho.dim(), x.dim(), "make_score");
  return {QuantumRep::score, x - HermitianMatrix::identity(x.dim()) * rho.expectation(x)};
}

QuantumTangent make_mixture(const HermitianMatrix& x) { return {QuantumRep::mixture, traceless(x)}; }

// ---------------------------------------------------------------------------
// exponential family

QuantumExponentialFamily::QuantumExponentialFamily(HermitianMatrix h0,
                                                   std::vector<HermitianMatrix> features)
    : h0_(std::move(h0)), f_(std::move(features)) {
  if (f_.empty()) throw InputError("quantum family needs at least one feature");
  const int n = size();
  for (const auto& f : f_) require_dim(f.dim(), dim(), "quantum family feature");
  MatrixXd gram(n, n);
  std::vector<HermitianMatrix> t;
  for (const auto& f : f_) t.push_back(traceless(f));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gram(i, j) = trace_product(t[i], t[j]);
  const double min_eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(gram).eigenvalues()(0);
  if (min_eig <= 1e-10) {
    throw InputError("quantum features are dependent modulo the identity (Gram min eigenvalue " +
                     fmt(min_eig) + ")");
  }
}

HermitianMatrix QuantumExponentialFamily::hamiltonian(const VectorXd& xi) const {
  if (xi.size() != size()) throw InputError("quantum family: xi has the wrong dimension");
  MatrixXcd h = h0_.mat();
  for (int j = 0; j < size(); ++j) h += xi(j) * f_[j].mat();
  return HermitianMatrix(h);
}

double log_partition(const HermitianMatrix& h) {
  const VectorXd e = eigh(h).eigenvalues;
  const double lo = e(0);
  return -lo + std::log((-(e.array() - lo)).exp().sum());
}

DensityMatrix state_from_score(const QuantumExponentialFamily& fam, const VectorXd& xi) {
  const SpectralDecomposition s = eigh(fam.hamiltonian(xi));
  const double lo = s.eigenvalues(0);
  VectorXd w = (-(s.eigenvalues.array() - lo)).exp();
  w /= w.sum();
  return DensityMatrix(s.reconstruct(w));
}

double quantum_massieu(const QuantumExponentialFamily& fam, const VectorXd& xi) {
  return log_partition(fam.hamiltonian(xi));
}

VectorXd quantum_means(const QuantumExponentialFamily& fam, const DensityMatrix& rho) {
  VectorXd eta(fam.size());
  for (int j = 0; j < fam.size(); ++j) eta(j) = rho.expectation(fam.features()[j]);
  return eta;
}

// ---------------------------------------------------------------------------
// metrics

double gns_metric(const DensityMatrix& rho, const QuantumTangent& x, const QuantumTangent& y) {
  const auto& xm = require_score(rho, x, "gns_metric").mat();
  const auto& ym = require_score(rho, y, "gns_metric").mat();
  return (rho.mat() * xm * ym).trace().real();
}

double bkm_metric(const DensityMatrix& rho, const QuantumTangent& x, const QuantumTangent& y) {
  const auto& xs = require_score(rho, x, "bkm_metric");
  const auto& ys = require_score(rho, y, "bkm_metric");
  return trace_product(xs, kernel_apply(rho.spectral(), ys, kernels::logarithmic_mean()));
}

MatrixXd bkm_covariance(const DensityMatrix& rho, const std::vector<HermitianMatrix>& ops) {
  const int n = static_cast<int>(ops.size());
  std::vector<HermitianMatrix> centred, weighted;
  for (const auto& op : ops) {
    centred.push_back(make_score(rho, op).matrix);
    weighted.push_back(kernel_apply(rho.spectral(), centred.back(), kernels::logarithmic_mean()));
  }
  MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = trace_product(centred[i], weighted[j]);
  return 0.5 * (g + g.transpose());
}

QuantumTangent quantum_tangent_convert(const DensityMatrix& rho, const QuantumTangent& t,
                                       QuantumRep target) {
  require_dim(rho.dim(), t.matrix.dim(), "quantum_tangent_convert");
  if (t.rep == target) {
    return target == QuantumRep::score ? make_score(rho, t.matrix) : make_mixture(t.matrix);
  }
  if (target == QuantumRep::mixture) {
    const HermitianMatrix x = make_score(rho, t.matrix).matrix;
    return make_mixture(kernel_apply(rho.spectral(), x, kernels::logarithmic_mean()));
  }
  const HermitianMatrix v = traceless(t.matrix);
  return make_score(rho, kernel_apply(rho.spectral(), v, kernels::log_difference_quotient()));
}

QuantumTangent quantum_parallel_transport(const DensityMatrix& rho, const DensityMatrix& sigma,
                                          const QuantumTangent& t, Connection which) {
  require_dim(rho.dim(), sigma.dim(), "quantum_parallel_transport");
  if (which == Connection::plus) {
    const QuantumTangent x = quantum_tangent_convert(rho, t, QuantumRep::score);
    return make_score(sigma, x.matrix);
  }
  return quantum_tangent_convert(rho, t, QuantumRep::mixture);
}

// ---------------------------------------------------------------------------
// logarithmic derivatives

HermitianMatrix state_derivative(const StatePath& path, double t0, double h) {
  const DensityMatrix up = path(t0 + h);
  const DensityMatrix down = path(t0 - h);
  require_dim(up.dim(), down.dim(), "state_derivative");
  const HermitianMatrix d(MatrixXcd((up.mat() - down.mat()) / (2.0 * h)));
  if (std::abs(d.trace()) > 1e-8) {
    throw DomainError("state path leaves the trace-one surface: Tr[d rho] = " + fmt(d.trace()));
  }
  return traceless(d);
}

LogDerivatives log_derivatives(const DensityMatrix& rho, const HermitianMatrix& drho_in) {
  require_dim(rho.dim(), drho_in.dim(), "log_derivatives");
  if (std::abs(drho_in.trace()) > 1e-8) {
    throw DomainError("log_derivatives: d rho is not traceless (trace " + fmt(drho_in.trace()) +
                      ")");
  }
  const HermitianMatrix drho = traceless(drho_in);
  const auto& s = rho.spectral();
  LogDerivatives out{
      MatrixXcd(s.eigenvectors * s.eigenvalues.cwiseInverse().cast<cplx>().asDiagonal() *
                s.eigenvectors.adjoint() * drho.mat()),
      false, kernel_apply(s, drho, kernels::sld()),
      kernel_apply(s, drho, kernels::log_difference_quotient())};
  const double scale = std::max(out.right.norm(), std::numeric_limits<double>::min());
  out.right_is_hermitian = (out.right - out.right.adjoint()).norm() <= 1e-10 * scale;
  return out;
}

LogDerivatives log_derivatives(const StatePath& path, double t0) {
  return log_derivatives(path(t0), state_derivative(path, t0));
}

const char* to_string(QuantumInfo which) {
  switch (which) {
    case QuantumInfo::gns_sld:
      return "gns_sld";
    case QuantumInfo::bkm:
      return "bkm";
    case QuantumInfo::right:
      return "right";
  }
  return "?";
}

double quantum_fisher_info(const DensityMatrix& rho, const HermitianMatrix& drho,
                           QuantumInfo which) {
  const LogDerivatives l = log_derivatives(rho, drho);
  switch (which) {
    case QuantumInfo::gns_sld:
      return (rho.mat() * l.symmetric.mat() * l.symmetric.mat()).trace().real();
    case QuantumInfo::bkm:
      return trace_product(traceless(drho), l.bkm);
    case QuantumInfo::right:
      return (rho.mat() * l.right.adjoint() * l.right).trace().real();
  }
  throw InputError("unknown quantum information kind");
}

double quantum_fisher_info(const StatePath& path, double t0, QuantumInfo which) {
  return quantum_fisher_info(path(t0), state_derivative(path, t0), which);
}

QuantumCramerRaoReport quantum_cramer_rao(const DensityMatrix& rho, const HermitianMatrix& drho,
                                          const HermitianMatrix& observable) {
  require_dim(rho.dim(), observable.dim(), "quantum_cramer_rao");
  QuantumCramerRaoReport r{};
  r.mean = rho.expectation(observable);
  r.mean_derivative = trace_product(traceless(drho), observable);
  if (std::abs(r.mean_derivative - 1.0) > 1e-6) {
    throw DomainError("observable is biased: d/dt Tr[rho X] = " + fmt(r.mean_derivative) +
                      ", expected 1");
  }
  const QuantumTangent x = make_score(rho, observable);
  r.variance = gns_metric(rho, x, x);
  r.bkm_variance = bkm_metric(rho, x, x);
  for (std::size_t k = 0; k < kAllQuantumInfos.size(); ++k) {
    r.info[k] = quantum_fisher_info(rho, drho, kAllQuantumInfos[k]);
    if (!(r.info[k] > 0.0)) {
      throw DomainError(std::string("quantum Fisher information '") +
                        to_string(kAllQuantumInfos[k]) + "' vanishes");
    }
    r.bound[k] = 1.0 / r.info[k];
    const double var = kAllQuantumInfos[k] == QuantumInfo::bkm ? r.bkm_variance : r.variance;
    r.slack[k] = var - r.bound[k];
  }
  return r;
}

QuantumCramerRaoReport quantum_cramer_rao(const StatePath& path, double t0,
                                          const HermitianMatrix& observable) {
  return quantum_cramer_rao(path(t0), state_derivative(path, t0), observable);
}

// ---------------------------------------------------------------------------
// maximum entropy

QuantumMaxentResult quantum_maxent_fit(const QuantumExponentialFamily& fam,
                                       const VectorXd& target, const QuantumMaxentOptions& opts) {
  const int n = fam.size();
  if (target.size() != n) throw InputError("quantum_maxent_fit: target has the wrong dimension");
  if (!target.allFinite()) throw InputError("quantum_maxent_fit: target is not finite");
  for (int j = 0; j < n; ++j) {
    const VectorXd e = eigh(fam.features()[j]).eigenvalues;
    if (!(target(j) > e(0) && target(j) < e(e.size() - 1))) {
      std::ostringstream os;
      os.precision(17);
      os << "quantum_maxent_fit: infeasible target, mean of feature " << j << " = " << target(j)
         << " is not inside its spectral range (" << e(0) << ", " << e(e.size() - 1) << ")";
      throw DomainError(os.str());
    }
  }

  VectorXd xi = opts.initial_xi.value_or(VectorXd::Zero(n));
  if (xi.size() != n) throw InputError("quantum_maxent_fit: warm start has the wrong dimension");

  struct Eval {
    VectorXd xi;
    double log_z;
    double obj;
  };
  auto evaluate = [&](const VectorXd& x) {
    const double lz = quantum_massieu(fam, x);
    return Eval{x, lz, lz + x.dot(target)};
  };

  Eval cur = evaluate(xi);
  std::vector<double> trace{cur.obj};
  double residual = 0.0;
  int polish = 0;
  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    const DensityMatrix rho = state_from_score(fam, cur.xi);
    const VectorXd r = quantum_means(fam, rho) - target;
    residual = r.cwiseAbs().maxCoeff();
    const bool converged = residual < opts.tol;
    if (converged && polish >= 2) return {cur.xi, rho, cur.log_z, iter, residual, trace};
    if (iter == opts.max_iter) break;
    if (cur.xi.cwiseAbs().maxCoeff() > opts.divergence_radius) {
      std::ostringstream os;
      os << "quantum_maxent_fit: infeasible or boundary target, |xi| exceeded "
         << opts.divergence_radius << " with residual " << residual;
      throw DomainError(os.str());
    }
    const MatrixXd hess = bkm_covariance(rho, fam.features());
    const VectorXd dir = hess.ldlt().solve(r);
    const double slope = -r.dot(dir);

    if (converged) {
      ++polish;
      const Eval trial = evaluate(cur.xi + dir);
      const double tres =
          (quantum_means(fam, state_from_score(fam, trial.xi)) - target).cwiseAbs().maxCoeff();
      if (tres < residual) {
        cur = trial;
        trace.push_back(cur.obj);
        continue;
      }
      return {cur.xi, rho, cur.log_z, iter, residual, trace};
    }

    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Eval trial = evaluate(cur.xi + step * dir);
      bool sufficient = trial.obj <= cur.obj + opts.armijo_slope * step * slope;
      if (!sufficient && bt == 0 && std::isfinite(trial.obj)) {
        const double tres =
            (quantum_means(fam, state_from_score(fam, trial.xi)) - target).cwiseAbs().maxCoeff();
        sufficient = tres < 0.5 * residual;
      }
      if (std::isfinite(trial.obj) && sufficient) {
        cur = trial;
        trace.push_back(cur.obj);
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted) {
      throw DomainError("quantum_maxent_fit: line search stalled with residual " + fmt(residual));
    }
  }
  throw DomainError("quantum_maxent_fit: Newton did not converge in " +
                    std::to_string(opts.max_iter) + " iterations, final residual " +
                    fmt(residual));
}

double quantum_entropy(const DensityMatrix& rho) { return entropy_of_spectrum(rho.eigenvalues()); }

LegendreResidual quantum_legendre_check(const QuantumExponentialFamily& fam, const VectorXd& xi,
                                        double h) {
  auto phi = [&](const DensityMatrix& rho) {
    return quantum_entropy(rho) - rho.expectation(fam.h0());
  };
  const DensityMatrix rho = state_from_score(fam, xi);
  const VectorXd eta = quantum_means(fam, rho);
  LegendreResidual r{std::abs(phi(rho) - (quantum_massieu(fam, xi) + xi.dot(eta))), 0.0};

  QuantumMaxentOptions opts;
  opts.initial_xi = xi;
  opts.tol = 1e-13;
  for (int j = 0; j < eta.size(); ++j) {
    const double step = h * std::max(1.0, std::abs(eta(j)));
    VectorXd up = eta, down = eta;
    up(j) += step;
    down(j) -= step;
    const double fd = (phi(quantum_maxent_fit(fam, up, opts).state) -
                       phi(quantum_maxent_fit(fam, down, opts).state)) /
                      (2.0 * step);
    r.gradient = std::max(r.gradient, std::abs(fd - xi(j)));
  }
  return r;
}

MixtureEntropyReport mixture_entropy_bound(const DensityMatrix& rho, const DensityMatrix& sigma,
                                           double lambda) {
  require_dim(rho.dim(), sigma.dim(), "mixture_entropy_bound");
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw InputError("mixture_entropy_bound: lambda must lie in (0, 1), got " + fmt(lambda));
  }
  const HermitianMatrix mix = rho.matrix() * lambda + sigma.matrix() * (1.0 - lambda);
  MixtureEntropyReport r{};
  r.lhs = entropy_of_spectrum(eigh(mix).eigenvalues);
  r.rhs = lambda * quantum_entropy(rho) + (1.0 - lambda) * quantum_entropy(sigma) +
          binary_entropy(lambda);
  r.slack = r.rhs - r.lhs;
  return r;
}

}  // namespace infogeo
