#include "infogeo/projection.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "infogeo/errors.hpp"

namespace infogeo {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double relative_entropy(const VectorXd& p, const VectorXd& q) {
  double d = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) d += p(i) * (std::log(p(i)) - std::log(q(i)));
  }
  return d;
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const HermitianMatrix log_sigma =
      matrix_function(sigma.spectral(), [](double x) { return std::log(x); });
  return -quantum_entropy(rho) - rho.expectation(log_sigma);
}

void require_step(double dt, int steps) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("dt must be positive, got " + fmt(dt));
  if (steps < 0) throw InputError("steps must be nonnegative");
}

}  // namespace

MarkovGenerator::MarkovGenerator(MatrixXd q) : q_(std::move(q)) {
  if (q_.rows() == 0 || q_.rows() != q_.cols()) throw InputError("generator must be square");
  if (!q_.allFinite()) throw InputError("generator has non-finite entries");
  for (int j = 0; j < q_.cols(); ++j) {
    const double sum = q_.col(j).sum();
    if (std::abs(sum) > 1e-12) {
      throw InputError("generator column " + std::to_string(j) + " sums to " + fmt(sum));
    }
    for (int i = 0; i < q_.rows(); ++i) {
      if (i != j && q_(i, j) < 0.0) {
        throw InputError("generator has a negative off-diagonal rate at (" + std::to_string(i) +
                         ", " + std::to_string(j) + ")");
      }
    }
  }
}

MatrixXd MarkovGenerator::propagator(double dt) const {
  MatrixXd p = (dt * q_).exp();
  // exact column sums are one; remove the rounding drift
  for (int j = 0; j < p.cols(); ++j) p.col(j) /= p.col(j).sum();
  return p;
}

FiniteDistribution micro_step(const FiniteDistribution& rho, const MarkovGenerator& q, double dt) {
  require_step(dt, 1);
  if (rho.omega_size() != q.size()) throw InputError("micro_step: state and generator sizes differ");
  const VectorXd next = q.propagator(dt) * rho.probs();
  return FiniteDistribution(next / next.sum(), Boundary::allow);
}

DensityMatrix micro_step(const DensityMatrix& rho, const QuantumStepMap& step, double dt) {
  require_step(dt, 1);
  if (const auto* h = std::get_if<HamiltonianStep>(&step)) {
    if (h->h.dim() != rho.dim()) throw InputError("micro_step: Hamiltonian dimension differs");
    const SpectralDecomposition s = eigh(h->h);
    const Eigen::VectorXcd phase =
        (s.eigenvalues.cast<cplx>() * cplx(0.0, -dt)).array().exp().matrix();
    const MatrixXcd u = s.eigenvectors * phase.asDiagonal() * s.eigenvectors.adjoint();
    HermitianMatrix next(MatrixXcd(u * rho.mat() * u.adjoint()));
    return DensityMatrix(next * (1.0 / next.trace()), Boundary::allow);
  }
  const auto& f = std::get<QuantumCPUnitalMap>(step);
  if (f.dim_in() != f.dim_out()) throw InputError("micro_step: channel must preserve dimension");
  return push_state(f, rho);
}

const char* ProjectionRun::projection() {
  return "m-projection (moment matching of the family features)";
}

ProjectionRun roll(const FiniteDistribution& initial, const MarkovGenerator& q,
                   std::shared_ptr<const ExponentialFamily> family, double dt, int steps,
                   const MaxentOptions& fit) {
  require_step(dt, steps);
  if (initial.omega_size() != q.size() || family->omega_size() != q.size()) {
    throw InputError("roll: state, generator and family sizes differ");
  }
  const MatrixXd p = q.propagator(dt);
  const MatrixXd& f = family->features();

  ProjectionRun run{dt, steps, {}, false, {}};
  MaxentOptions opts = fit;
  VectorXd pre = initial.probs();
  for (int k = 0; k <= steps; ++k) {
    if (k > 0) {
      pre = p * run.trajectory.back().probs;
      pre /= pre.sum();
      if (!(pre.minCoeff() > kFaithfulFloor)) {
        run.truncated = true;
        run.diagnostic = "step " + std::to_string(k) + ": state left the faithful interior";
        break;
      }
    }
    const VectorXd target = f.transpose() * pre;
    std::optional<MaxentResult> fitted;
    try {
      fitted = maxent_fit_detailed(family, target, opts);
    } catch (const DomainError& e) {
      run.truncated = true;
      run.diagnostic = "step " + std::to_string(k) + ": projection failed: " + e.what();
      break;
    }
    const MaxentResult& res = *fitted;
    const VectorXd eta = mixture_coords(res.point);
    const FiniteDistribution pre_dist(pre, Boundary::allow);
    run.trajectory.push_back({k * dt, res.point.xi(), eta,
                              entropy(res.point.to_distribution(Boundary::allow)),
                              entropy(pre_dist), relative_entropy(pre, res.point.probs()),
                              (eta - target).cwiseAbs().maxCoeff(), res.iterations,
                              res.point.probs(), MatrixXcd()});
    opts.initial_xi = res.point.xi();
  }
  return run;
}

ProjectionRun roll(const DensityMatrix& initial, const QuantumStepMap& step,
                   const QuantumExponentialFamily& family, double dt, int steps,
                   const QuantumMaxentOptions& fit) {
  require_step(dt, steps);
  if (initial.dim() != family.dim()) throw InputError("roll: state and family dimensions differ");

  ProjectionRun run{dt, steps, {}, false, {}};
  QuantumMaxentOptions opts = fit;
  DensityMatrix pre = initial;
  for (int k = 0; k <= steps; ++k) {
    if (k > 0) {
      pre = micro_step(DensityMatrix(HermitianMatrix(run.trajectory.back().rho), Boundary::allow),
                       step, dt);
      if (!(pre.eigenvalues()(0) > kFaithfulFloor)) {
        run.truncated = true;
        run.diagnostic = "step " + std::to_string(k) + ": state left the faithful interior";
        break;
      }
    }
    const VectorXd target = quantum_means(family, pre);
    std::optional<QuantumMaxentResult> fitted;
    try {
      fitted = quantum_maxent_fit(family, target, opts);
    } catch (const DomainError& e) {
      run.truncated = true;
      run.diagnostic = "step " + std::to_string(k) + ": projection failed: " + e.what();
      break;
    }
    const QuantumMaxentResult& res = *fitted;
    const VectorXd eta = quantum_means(family, res.state);
    run.trajectory.push_back({k * dt, res.xi, eta, quantum_entropy(res.state), quantum_entropy(pre),
                              relative_entropy(pre, res.state),
                              (eta - target).cwiseAbs().maxCoeff(), res.iterations, VectorXd(),
                              res.state.mat()});
    opts.initial_xi = res.xi;
  }
  return run;
}

std::vector<double> entropy_production(const ProjectionRun& run) {
  std::vector<double> s;
  for (const auto& r : run.trajectory) s.push_back(r.entropy);
  return s;
}

}  // namespace infogeo
