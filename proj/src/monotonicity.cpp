#include "infogeo/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "infogeo/errors.hpp"
#include "infogeo/random.hpp"

namespace infogeo {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

MatrixXd generalized_pair(const std::vector<VectorXd>& d, const FiniteDistribution& rho) {
  const int n = static_cast<int>(d.size());
  MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = (d[i].array() * d[j].array() / rho.probs().array()).sum();
  return g;
}

double max_generalized_ratio(const MatrixXd& pushed, const MatrixXd& original) {
  const MatrixXd a = 0.5 * (pushed + pushed.transpose());
  const MatrixXd b = 0.5 * (original + original.transpose());
  const double bmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(b).eigenvalues()(0);
  if (!(bmin > 0.0)) {
    throw DomainError("original information matrix is not positive definite (min eigenvalue " +
                      fmt(bmin) + ")");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(a, b);
  return std::max(0.0, ges.eigenvalues().maxCoeff());
}

PairKernel mixture_kernel(AuditMetric which) {
  switch (which) {
    case AuditMetric::gns:
      return kernels::sld();
    case AuditMetric::bkm:
      return kernels::log_difference_quotient();
    case AuditMetric::fisher:
      break;
  }
  throw InputError("the fisher metric is classical; use gns or bkm for quantum states");
}

MatrixXcd complex_gaussian(int rows, int cols, std::mt19937_64& eng) {
  MatrixXcd g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = standard_normal(eng);
      const double im = standard_normal(eng);
      g(i, j) = cplx(re, im);
    }
  return g;
}

// Q factor with the phases of diag(R) removed, so the distribution is Haar.
MatrixXcd orthonormal_columns(const MatrixXcd& g) {
  Eigen::HouseholderQR<MatrixXcd> qr(g);
  MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(g.rows(), g.cols());
  const MatrixXcd r = qr.matrixQR();
  for (int j = 0; j < g.cols(); ++j) {
    const cplx d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

}  // namespace

// ---------------------------------------------------------------------------
// maps

ClassicalStochasticMap::ClassicalStochasticMap(MatrixXd s) : s_(std::move(s)) {
  if (s_.rows() == 0 || s_.cols() == 0) throw InputError("stochastic map is empty");
  if (!s_.allFinite()) throw InputError("stochastic map has non-finite entries");
  if (s_.minCoeff() < 0.0) throw InputError("stochastic map has a negative entry");
  for (int i = 0; i < s_.rows(); ++i) {
    const double sum = s_.row(i).sum();
    if (std::abs(sum - 1.0) > 1e-12) {
      throw InputError("stochastic map row " + std::to_string(i) + " sums to " + fmt(sum));
    }
  }
}

ClassicalStochasticMap ClassicalStochasticMap::identity(int n) {
  return ClassicalStochasticMap(MatrixXd::Identity(n, n));
}

ClassicalStochasticMap ClassicalStochasticMap::permutation(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  MatrixXd s = MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    if (perm[j] < 0 || perm[j] >= n) throw InputError("permutation index out of range");
    s(perm[j], j) = 1.0;
  }
  return ClassicalStochasticMap(s);
}

QuantumCPUnitalMap::QuantumCPUnitalMap(std::vector<MatrixXcd> kraus) : k_(std::move(kraus)) {
  if (k_.empty()) throw InputError("Kraus set is empty");
  const auto rows = k_.front().rows(), cols = k_.front().cols();
  if (rows == 0 || cols == 0) throw InputError("Kraus operator is empty");
  MatrixXcd sum = MatrixXcd::Zero(cols, cols);
  for (const auto& a : k_) {
    if (a.rows() != rows || a.cols() != cols) throw InputError("Kraus operators differ in shape");
    if (!a.allFinite()) throw InputError("Kraus operator has non-finite entries");
    sum += a.adjoint() * a;
  }
  const double res = (sum - MatrixXcd::Identity(cols, cols)).norm();
  if (res > 1e-10) throw InputError("Kraus set is not unital: |sum A^H A - I| = " + fmt(res));
}

QuantumCPUnitalMap QuantumCPUnitalMap::unitary(const MatrixXcd& u) {
  return QuantumCPUnitalMap({u});
}

QuantumCPUnitalMap QuantumCPUnitalMap::depolarizing_qubit(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("depolarizing strength must lie in [0, 1]");
  const cplx i(0.0, 1.0);
  MatrixXcd sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0.0, 1.0, 1.0, 0.0;
  sy << 0.0, -i, i, 0.0;
  sz << 1.0, 0.0, 0.0, -1.0;
  const double a = std::sqrt(1.0 - q), b = std::sqrt(q / 3.0);
  return QuantumCPUnitalMap({a * MatrixXcd::Identity(2, 2), b * sx, b * sy, b * sz});
}

FiniteDistribution push_state(const ClassicalStochasticMap& s, const FiniteDistribution& rho) {
  if (rho.omega_size() != s.rows()) throw InputError("push_state: state and map sizes differ");
  VectorXd out = s.matrix().transpose() * rho.probs();
  return FiniteDistribution(out / out.sum(), Boundary::allow);
}

VectorXd push_observable(const ClassicalStochasticMap& s, const VectorXd& f) {
  if (f.size() != s.cols()) throw InputError("push_observable: size mismatch");
  return s.matrix() * f;
}

VectorXd push_mixture(const ClassicalStochasticMap& s, const VectorXd& v) {
  if (v.size() != s.rows()) throw InputError("push_mixture: size mismatch");
  return s.matrix().transpose() * v;
}

DensityMatrix push_state(const QuantumCPUnitalMap& f, const DensityMatrix& rho) {
  if (rho.dim() != f.dim_in()) throw InputError("push_state: state and map dimensions differ");
  MatrixXcd out = MatrixXcd::Zero(f.dim_out(), f.dim_out());
  for (const auto& a : f.kraus()) out += a * rho.mat() * a.adjoint();
  HermitianMatrix h(out);
  return DensityMatrix(h * (1.0 / h.trace()), Boundary::allow);
}

HermitianMatrix push_observable(const QuantumCPUnitalMap& f, const HermitianMatrix& x) {
  if (x.dim() != f.dim_out()) throw InputError("push_observable: dimension mismatch");
  MatrixXcd out = MatrixXcd::Zero(f.dim_in(), f.dim_in());
  for (const auto& a : f.kraus()) out += a.adjoint() * x.mat() * a;
  return HermitianMatrix(out);
}

HermitianMatrix push_mixture(const QuantumCPUnitalMap& f, const HermitianMatrix& v) {
  if (v.dim() != f.dim_in()) throw InputError("push_mixture: dimension mismatch");
  MatrixXcd out = MatrixXcd::Zero(f.dim_out(), f.dim_out());
  for (const auto& a : f.kraus()) out += a * v.mat() * a.adjoint();
  return HermitianMatrix(out);
}

// ---------------------------------------------------------------------------
// metrics and audits

const char* to_string(AuditMetric m) {
  switch (m) {
    case AuditMetric::fisher:
      return "fisher";
    case AuditMetric::gns:
      return "gns";
    case AuditMetric::bkm:
      return "bkm";
  }
  return "?";
}

AuditMetric parse_audit_metric(const std::string& s) {
  if (s == "fisher") return AuditMetric::fisher;
  if (s == "gns") return AuditMetric::gns;
  if (s == "bkm") return AuditMetric::bkm;
  throw InputError("unknown metric '" + s + "' (expected fisher, gns or bkm)");
}

double mixture_metric(const FiniteDistribution& rho, const VectorXd& v) {
  if (v.size() != rho.omega_size()) throw InputError("mixture_metric: size mismatch");
  return (v.array().square() / rho.probs().array()).sum();
}

double mixture_metric(const DensityMatrix& rho, const HermitianMatrix& v, AuditMetric which) {
  if (v.dim() != rho.dim()) throw InputError("mixture_metric: dimension mismatch");
  return trace_product(v, kernel_apply(rho.spectral(), v, mixture_kernel(which)));
}

double audit_metric_contraction(const ClassicalStochasticMap& s, const FiniteDistribution& rho,
                                const ClassicalTangent& x) {
  const VectorXd v = tangent_convert(rho, x, TangentRep::mixture).vec;
  if (v.cwiseAbs().maxCoeff() == 0.0) throw InputError("audit: zero input tangent");
  const FiniteDistribution pushed = push_state(s, rho);
  if (!pushed.faithful()) throw DomainError("audit: pushed state is on the boundary");
  return mixture_metric(pushed, push_mixture(s, v)) / mixture_metric(rho, v);
}

double audit_metric_contraction(const QuantumCPUnitalMap& f, const DensityMatrix& rho,
                                const QuantumTangent& x, AuditMetric which) {
  HermitianMatrix v = x.matrix;
  if (x.rep == QuantumRep::score) {
    v = which == AuditMetric::gns
            ? kernel_apply(rho.spectral(), make_score(rho, x.matrix).matrix,
                           kernels::arithmetic_mean())
            : quantum_tangent_convert(rho, x, QuantumRep::mixture).matrix;
  } else {
    v = make_mixture(v).matrix;
  }
  if (v.frobenius_norm() == 0.0) throw InputError("audit: zero input tangent");
  const DensityMatrix pushed = push_state(f, rho);
  if (!(pushed.eigenvalues()(0) > kFaithfulFloor)) {
    throw DomainError("audit: pushed state is on the boundary");
  }
  return mixture_metric(pushed, push_mixture(f, v), which) / mixture_metric(rho, v, which);
}

double audit_family_info(const ClassicalStochasticMap& s, const ParametricFamily& fam,
                         const VectorXd& theta) {
  const FiniteDistribution rho = fam(theta);
  const MatrixXd scores = fam.scores(theta);
  const FiniteDistribution pushed = push_state(s, rho);
  std::vector<VectorXd> d, dp;
  for (int k = 0; k < scores.cols(); ++k) {
    d.push_back(rho.probs().cwiseProduct(scores.col(k)));
    dp.push_back(push_mixture(s, d.back()));
  }
  const MatrixXd g = generalized_pair(d, rho);
  if (!pushed.faithful()) throw DomainError("audit: pushed state is on the boundary");
  return max_generalized_ratio(generalized_pair(dp, pushed), g);
}

namespace {

std::vector<HermitianMatrix> family_derivatives(const QuantumFamilyMap& fam, const VectorXd& theta) {
  std::vector<HermitianMatrix> out;
  for (int k = 0; k < theta.size(); ++k) {
    StatePath path = [&](double t) {
      VectorXd th = theta;
      th(k) = t;
      return fam(th);
    };
    out.push_back(state_derivative(path, theta(k)));
  }
  return out;
}

MatrixXd pairing_matrix(const DensityMatrix& rho, const std::vector<HermitianMatrix>& d,
                        AuditMetric which) {
  const int n = static_cast<int>(d.size());
  const PairKernel k = mixture_kernel(which);
  std::vector<HermitianMatrix> kd;
  for (const auto& x : d) kd.push_back(kernel_apply(rho.spectral(), x, k));
  MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = trace_product(d[i], kd[j]);
  return 0.5 * (g + g.transpose());
}

}  // namespace

MatrixXd quantum_family_info(const QuantumFamilyMap& fam, const VectorXd& theta,
                             AuditMetric which) {
  const auto d = family_derivatives(fam, theta);
  return pairing_matrix(fam(theta), d, which);
}

double audit_family_info(const QuantumCPUnitalMap& f, const QuantumFamilyMap& fam,
                         const VectorXd& theta, AuditMetric which) {
  const MatrixXd g = quantum_family_info(fam, theta, which);
  const DensityMatrix pushed = push_state(f, fam(theta));
  if (!(pushed.eigenvalues()(0) > kFaithfulFloor)) {
    throw DomainError("audit: pushed state is on the boundary");
  }
  std::vector<HermitianMatrix> dp;
  for (const auto& d : family_derivatives(fam, theta)) {
    dp.push_back(push_mixture(f, d));
  }
  return max_generalized_ratio(pairing_matrix(pushed, dp, which), g);
}

// ---------------------------------------------------------------------------
// random maps

ClassicalStochasticMap random_classical_map(int rows, int cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw InputError("random_classical_map: dimensions must be positive");
  std::mt19937_64 eng(seed);
  MatrixXd s(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) s(i, j) = standard_exponential(eng);
    s.row(i) /= s.row(i).sum();
  }
  return ClassicalStochasticMap(s);
}

QuantumCPUnitalMap random_quantum_map(int dim_in, int dim_out, int n_kraus, std::uint64_t seed) {
  if (dim_in < 1 || dim_out < 1 || n_kraus < 1) {
    throw InputError("random_quantum_map: dimensions must be positive");
  }
  if (n_kraus * dim_out < dim_in) {
    throw InputError("random_quantum_map: n_kraus * dim_out must be at least dim_in");
  }
  std::mt19937_64 eng(seed);
  const MatrixXcd w = orthonormal_columns(complex_gaussian(n_kraus * dim_out, dim_in, eng));
  std::vector<MatrixXcd> kraus;
  for (int k = 0; k < n_kraus; ++k) kraus.push_back(w.middleRows(k * dim_out, dim_out));
  return QuantumCPUnitalMap(std::move(kraus));
}

MatrixXcd random_unitary(int dim, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  return orthonormal_columns(complex_gaussian(dim, dim, eng));
}

// ---------------------------------------------------------------------------
// sweep

ContractionReport audit_sweep(AuditMetric which, int dim, int trials, std::uint64_t seed) {
  if (dim < 2) throw InputError("audit_sweep: dim must be at least 2");
  if (trials < 0) throw InputError("audit_sweep: trials must be nonnegative");
  ContractionReport rep;
  rep.metric = which;
  rep.trials = trials;
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 eng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const int dim_out = 2 + static_cast<int>(eng() % static_cast<std::uint64_t>(dim));
    double ratio;
    try {
      if (which == AuditMetric::fisher) {
        VectorXd w(dim), v(dim);
        for (int i = 0; i < dim; ++i) w(i) = standard_exponential(eng);
        for (int i = 0; i < dim; ++i) v(i) = standard_normal(eng);
        v.array() -= v.mean();
        const auto s = random_classical_map(dim, dim_out, eng());
        ratio = audit_metric_contraction(s, FiniteDistribution::normalized(w),
                                         {TangentRep::mixture, v});
      } else {
        const MatrixXcd g = complex_gaussian(dim, dim, eng);
        const MatrixXcd h = complex_gaussian(dim, dim, eng);
        const DensityMatrix rho = DensityMatrix::normalized(HermitianMatrix(MatrixXcd(g * g.adjoint())));
        const int k_min = std::max((dim + dim_out - 1) / dim_out, (dim_out + dim - 1) / dim);
        const int n_kraus = k_min + static_cast<int>(eng() % 3);
        const auto f = random_quantum_map(dim, dim_out, n_kraus, eng());
        ratio = audit_metric_contraction(f, rho, make_mixture(HermitianMatrix(h)), which);
      }
    } catch (const DomainError&) {
      ++rep.skipped;
      continue;
    }
    rep.ratios.push_back(ratio);
    rep.worst_violation = std::max(rep.worst_violation, ratio - 1.0);
    const int bin = std::clamp(static_cast<int>(std::floor(ratio * 20.0)), 0, 19);
    ++rep.histogram[static_cast<std::size_t>(bin)];
  }
  if (rep.ratios.empty()) rep.worst_violation = 0.0;
  return rep;
}

}  // namespace infogeo
