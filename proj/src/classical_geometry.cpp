#include "infogeo/classical_geometry.hpp"

#include <cmath>
#include <sstream>

#include "infogeo/classical_estimation.hpp"
#include "infogeo/errors.hpp"

namespace infogeo {

namespace {

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require_same_size(Eigen::Index a, Eigen::Index b, const char* where) {
  if (a != b) {
    std::ostringstream os;
    os << where << ": shape mismatch (" << a << " vs " << b << ")";
    throw InputError(os.str());
  }
}

// Centered features C(w, j) = f_j(w) - eta_j under probabilities p.
MatrixXd centered_features(const MatrixXd& f, const VectorXd& p) {
  const VectorXd eta = f.transpose() * p;
  return f.rowwise() - eta.transpose();
}

}  // namespace

// ---------------------------------------------------------------------------
// FiniteDistribution

FiniteDistribution::FiniteDistribution(VectorXd probs, Boundary boundary) : p_(std::move(probs)) {
  if (p_.size() == 0) throw InputError("distribution over an empty sample space");
  if (!p_.allFinite()) throw InputError("distribution has non-finite entries");
  if (p_.minCoeff() < 0.0) {
    throw InputError("distribution has a negative entry " + fmt_double(p_.minCoeff()));
  }
  const double total = p_.sum();
  if (std::abs(total - 1.0) > 1e-12) {
    throw InputError("distribution sums to " + fmt_double(total) + ", expected 1");
  }
  if (boundary == Boundary::reject && p_.minCoeff() <= kFaithfulFloor) {
    throw InputError("distribution is not faithful: min probability " +
                     fmt_double(p_.minCoeff()) + " at or below floor 1e-14");
  }
}

FiniteDistribution FiniteDistribution::normalized(const VectorXd& weights, Boundary boundary) {
  const double total = weights.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw InputError("cannot normalize weights with sum " + fmt_double(total));
  }
  return FiniteDistribution(weights / total, boundary);
}

FiniteDistribution FiniteDistribution::uniform(int omega_size) {
  if (omega_size <= 0) throw InputError("uniform distribution needs |Omega| >= 1");
  return FiniteDistribution(VectorXd::Constant(omega_size, 1.0 / omega_size));
}

double FiniteDistribution::expectation(const VectorXd& f) const {
  require_same_size(f.size(), p_.size(), "expectation");
  return p_.dot(f);
}

// ---------------------------------------------------------------------------
// ExponentialFamily

ExponentialFamily::ExponentialFamily(MatrixXd features, std::optional<VectorXd> base_log_density)
    : f_(std::move(features)) {
  const auto omega = f_.rows();
  const auto n = f_.cols();
  if (omega < 2 || n < 1) throw InputError("exponential family needs |Omega| >= 2 and n >= 1");
  if (n >= omega) {
    std::ostringstream os;
    os << "exponential family has n = " << n << " features on |Omega| = " << omega
       << "; need n < |Omega|";
    throw InputError(os.str());
  }
  if (!f_.allFinite()) throw InputError("features have non-finite entries");
  b_ = base_log_density.value_or(VectorXd::Zero(omega));
  require_same_size(b_.size(), omega, "base_log_density");
  if (!b_.allFinite()) throw InputError("base_log_density has non-finite entries");

  // Independence modulo constants: a constant direction is absorbed by Z.
  const MatrixXd c = f_.rowwise() - f_.colwise().mean();
  const MatrixXd gram = c.transpose() * c;
  const double min_eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(gram).eigenvalues()(0);
  if (min_eig <= 1e-10) {
    throw InputError("features are linearly dependent modulo constants (Gram min eigenvalue " +
                     fmt_double(min_eig) + ")");
  }
}

ExponentialFamily ExponentialFamily::rescaled(const VectorXd& scale) const {
  require_same_size(scale.size(), dim(), "rescaled");
  return ExponentialFamily(f_ * scale.asDiagonal(), b_);
}

// ---------------------------------------------------------------------------
// CanonicalPoint

CanonicalPoint::CanonicalPoint(std::shared_ptr<const ExponentialFamily> family, VectorXd xi)
    : family_(std::move(family)), xi_(std::move(xi)) {
  if (!family_) throw InputError("canonical point without a family");
  require_same_size(xi_.size(), family_->dim(), "canonical point");
  if (!xi_.allFinite()) throw InputError("canonical coordinates are not finite");
  const VectorXd logw = family_->base_log_density() - family_->features() * xi_;
  const double top = logw.maxCoeff();
  const double z = (logw.array() - top).exp().sum();
  psi_ = top + std::log(z);
  probs_ = (logw.array() - psi_).exp();
  probs_ /= probs_.sum();
}

FiniteDistribution CanonicalPoint::to_distribution(Boundary boundary) const {
  return FiniteDistribution(probs_, boundary);
}

// ---------------------------------------------------------------------------
// tangents and metric

ClassicalTangent tangent_convert(const FiniteDistribution& rho, const ClassicalTangent& t,
                                 TangentRep target) {
  require_same_size(t.vec.size(), rho.omega_size(), "tangent_convert");
  const VectorXd& p = rho.probs();
  if (t.rep == target) {
    if (target == TangentRep::mixture) return {target, t.vec.array() - p.array() * t.vec.sum()};
    return {target, t.vec.array() - p.dot(t.vec)};
  }
  if (target == TangentRep::exponential) {
    VectorXd x = t.vec.array() / p.array();
    x.array() -= p.dot(x);
    return {target, x};
  }
  VectorXd centred = t.vec.array() - p.dot(t.vec);
  return {target, p.array() * centred.array()};
}

double fisher_metric(const FiniteDistribution& rho, const ClassicalTangent& x,
                     const ClassicalTangent& y) {
  require_same_size(x.vec.size(), rho.omega_size(), "fisher_metric");
  require_same_size(y.vec.size(), rho.omega_size(), "fisher_metric");
  const VectorXd xs = tangent_convert(rho, x, TangentRep::exponential).vec;
  const VectorXd ys = tangent_convert(rho, y, TangentRep::exponential).vec;
  return (rho.probs().array() * xs.array() * ys.array()).sum();
}

// ---------------------------------------------------------------------------
// Massieu function

double massieu(const CanonicalPoint& pt) { return pt.psi(); }

VectorXd mixture_coords(const CanonicalPoint& pt) {
  return pt.family().features().transpose() * pt.probs();
}

MatrixXd covariance(const CanonicalPoint& pt) {
  const MatrixXd c = centered_features(pt.family().features(), pt.probs());
  MatrixXd v = c.transpose() * pt.probs().asDiagonal() * c;
  return 0.5 * (v + v.transpose());
}

double entropy(const FiniteDistribution& rho) {
  double s = 0.0;
  for (int i = 0; i < rho.omega_size(); ++i) {
    const double p = rho(i);
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

namespace {

double relative_entropy_phi(const CanonicalPoint& pt) {
  const FiniteDistribution d = pt.to_distribution(Boundary::allow);
  return entropy(d) + d.expectation(pt.family().base_log_density());
}

}  // namespace

LegendreResidual legendre_check(const CanonicalPoint& pt, double h) {
  const VectorXd eta = mixture_coords(pt);
  const double phi = relative_entropy_phi(pt);
  LegendreResidual r{std::abs(phi - (pt.psi() + pt.xi().dot(eta))), 0.0};

  MaxentOptions opts;
  opts.initial_xi = pt.xi();
  opts.tol = 1e-13;
  for (int j = 0; j < eta.size(); ++j) {
    const double step = h * std::max(1.0, std::abs(eta(j)));
    VectorXd up = eta, down = eta;
    up(j) += step;
    down(j) -= step;
    const double phi_up = relative_entropy_phi(maxent_fit(pt.family_ptr(), up, opts));
    const double phi_down = relative_entropy_phi(maxent_fit(pt.family_ptr(), down, opts));
    const double fd = (phi_up - phi_down) / (2.0 * step);
    r.gradient = std::max(r.gradient, std::abs(fd - pt.xi()(j)));
  }
  return r;
}

// ---------------------------------------------------------------------------
// embeddings

VectorXd alpha_embed(const FiniteDistribution& rho, double alpha) {
  if (!(alpha >= -1.0 && alpha <= 1.0)) {
    throw InputError("alpha_embed: alpha must lie in [-1, 1], got " + fmt_double(alpha));
  }
  if (alpha == 1.0) {
    throw DomainError(
        "alpha_embed: alpha = 1 is unsupported (exponent 0 collapses the embedding); use score "
        "coordinates");
  }
  return rho.probs().array().pow(0.5 * (1.0 - alpha));
}

double hellinger_distance(const FiniteDistribution& rho, const FiniteDistribution& sigma) {
  require_same_size(rho.omega_size(), sigma.omega_size(), "hellinger_distance");
  return (rho.probs().array().sqrt() - sigma.probs().array().sqrt()).matrix().norm();
}

double bhattacharyya_angle(const FiniteDistribution& rho, const FiniteDistribution& sigma) {
  require_same_size(rho.omega_size(), sigma.omega_size(), "bhattacharyya_angle");
  const double bc = (rho.probs().array() * sigma.probs().array()).sqrt().sum();
  return std::acos(std::min(1.0, bc));
}

// ---------------------------------------------------------------------------
// alpha connections

Tensor3 skewness_tensor(const CanonicalPoint& pt) {
  const MatrixXd c = centered_features(pt.family().features(), pt.probs());
  const int n = pt.family().dim();
  Tensor3 t(n);
  for (int k = 0; k < n; ++k) {
    const VectorXd w = pt.probs().array() * c.col(k).array();
    t[k] = c.transpose() * w.asDiagonal() * c;
  }
  return t;
}

namespace {

Eigen::LDLT<MatrixXd> factor_fisher(const MatrixXd& g) {
  Eigen::LDLT<MatrixXd> ldlt(g);
  const double dmax = ldlt.vectorD().cwiseAbs().maxCoeff();
  const double dmin = ldlt.vectorD().minCoeff();
  if (ldlt.info() != Eigen::Success || !(dmin > 1e-14 * std::max(1.0, dmax))) {
    throw DomainError("Fisher matrix is singular (min pivot " + fmt_double(dmin) + ")");
  }
  return ldlt;
}

}  // namespace

// In canonical coordinates xi the score is -(f - eta), so the first-kind
// symbols are Gamma_{ij,k} = -(1 - alpha)/2 * T_ijk with T the third central
// moment of the features; d_k G_ij = -T_ijk fixes the sign.
Tensor3 christoffel(const CanonicalPoint& pt, double alpha) {
  const int n = pt.family().dim();
  Tensor3 gamma(n, MatrixXd::Zero(n, n));
  if (alpha == 1.0) return gamma;
  const Tensor3 t = skewness_tensor(pt);
  const auto ldlt = factor_fisher(covariance(pt));
  const double c = -0.5 * (1.0 - alpha);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      VectorXd lowered(n);
      for (int l = 0; l < n; ++l) lowered(l) = c * t[l](i, j);
      const VectorXd raised = ldlt.solve(lowered);
      for (int k = 0; k < n; ++k) gamma[k](i, j) = raised(k);
    }
  }
  return gamma;
}

namespace {

// x'' = -Gamma^k_ij x'^i x'^j = (1 - alpha)/2 * V^{-1} T(v, v).
VectorXd geodesic_accel(const std::shared_ptr<const ExponentialFamily>& fam, const VectorXd& x,
                        const VectorXd& v, double alpha) {
  if (alpha == 1.0) return VectorXd::Zero(x.size());
  const CanonicalPoint pt(fam, x);
  const MatrixXd c = centered_features(fam->features(), pt.probs());
  const VectorXd s = c * v;
  const VectorXd weights = pt.probs().array() * s.array().square();
  const VectorXd tvv = c.transpose() * weights;
  const MatrixXd g = c.transpose() * pt.probs().asDiagonal() * c;
  return 0.5 * (1.0 - alpha) * factor_fisher(0.5 * (g + g.transpose())).solve(tvv);
}

}  // namespace

GeodesicPath geodesic(const CanonicalPoint& start, const VectorXd& velocity, double alpha,
                      double t_max, double dt, GeodesicOptions opts) {
  if (!(dt > 0.0)) throw InputError("geodesic: dt must be positive");
  if (!(t_max >= 0.0)) throw InputError("geodesic: t_max must be nonnegative");
  require_same_size(velocity.size(), start.family().dim(), "geodesic");
  const auto fam = start.family_ptr();
  const long steps = std::lround(t_max / dt);

  GeodesicPath path;
  path.t.push_back(0.0);
  path.points.push_back(start);
  VectorXd x = start.xi();
  VectorXd v = velocity;
  if (alpha == 1.0) {
    // flat in xi: closed form, no integration error
    for (long k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k + 1) * dt;
      x = start.xi() + t * velocity;
      if (!x.allFinite() || x.cwiseAbs().maxCoeff() > opts.box) {
        path.truncated = true;
        break;
      }
      path.t.push_back(t);
      path.points.emplace_back(fam, x);
    }
    return path;
  }
  for (long k = 0; k < steps; ++k) {
    const VectorXd a1 = geodesic_accel(fam, x, v, alpha);
    const VectorXd x2 = x + 0.5 * dt * v, v2 = v + 0.5 * dt * a1;
    const VectorXd a2 = geodesic_accel(fam, x2, v2, alpha);
    const VectorXd x3 = x + 0.5 * dt * v2, v3 = v + 0.5 * dt * a2;
    const VectorXd a3 = geodesic_accel(fam, x3, v3, alpha);
    const VectorXd x4 = x + dt * v3, v4 = v + dt * a3;
    const VectorXd a4 = geodesic_accel(fam, x4, v4, alpha);
    x += dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4);
    v += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > opts.box) {
      path.truncated = true;
      break;
    }
    path.t.push_back(static_cast<double>(k + 1) * dt);
    path.points.emplace_back(fam, x);
  }
  return path;
}

ClassicalTangent parallel_transport(const FiniteDistribution& rho, const FiniteDistribution& sigma,
                                    const ClassicalTangent& t, Connection which) {
  require_same_size(rho.omega_size(), sigma.omega_size(), "parallel_transport");
  if (which == Connection::plus) {
    const VectorXd x = tangent_convert(rho, t, TangentRep::exponential).vec;
    return {TangentRep::exponential, x.array() - sigma.expectation(x)};
  }
  return {TangentRep::mixture, tangent_convert(rho, t, TangentRep::mixture).vec};
}

}  // namespace infogeo
