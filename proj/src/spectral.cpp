#include "infogeo/spectral.hpp"

#include <cmath>
#include <sstream>

#include "infogeo/errors.hpp"

namespace infogeo {

namespace {

void require_square_finite(const MatrixXcd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << "Hermitian matrix must be square and non-empty, got " << m.rows() << "x" << m.cols();
    throw InputError(os.str());
  }
  if (!m.allFinite()) throw InputError("Hermitian matrix has non-finite entries");
}

// Matches Eigen's SelfAdjointEigenSolver budget (m_maxIterations * n).
constexpr int kEigenIterationsPerDim = 30;

}  // namespace

HermitianMatrix::HermitianMatrix(const MatrixXcd& raw) {
  require_square_finite(raw);
  m_ = 0.5 * (raw + raw.adjoint());
}

HermitianMatrix::HermitianMatrix(const MatrixXd& raw)
    : HermitianMatrix(MatrixXcd(raw.cast<cplx>())) {}

HermitianMatrix HermitianMatrix::zero(int dim) {
  return HermitianMatrix(MatrixXcd(MatrixXcd::Zero(dim, dim)));
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  return HermitianMatrix(MatrixXcd(MatrixXcd::Identity(dim, dim)));
}

HermitianMatrix HermitianMatrix::diagonal(const VectorXd& diag) {
  return HermitianMatrix(MatrixXcd(diag.cast<cplx>().asDiagonal()));
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  if (o.dim() != dim()) throw InputError("dimension mismatch in Hermitian sum");
  return HermitianMatrix(MatrixXcd(m_ + o.m_));
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  if (o.dim() != dim()) throw InputError("dimension mismatch in Hermitian difference");
  return HermitianMatrix(MatrixXcd(m_ - o.m_));
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
  return HermitianMatrix(MatrixXcd(m_ * s));
}

double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw InputError("dimension mismatch in trace product");
  // Tr[AB] = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
  return (a.mat().array() * b.mat().conjugate().array()).sum().real();
}

HermitianMatrix SpectralDecomposition::reconstruct(const VectorXd& values) const {
  return HermitianMatrix(
      MatrixXcd(eigenvectors * values.cast<cplx>().asDiagonal() * eigenvectors.adjoint()));
}

MatrixXcd SpectralDecomposition::to_eigenbasis(const MatrixXcd& x) const {
  return eigenvectors.adjoint() * x * eigenvectors;
}

MatrixXcd SpectralDecomposition::from_eigenbasis(const MatrixXcd& x) const {
  return eigenvectors * x * eigenvectors.adjoint();
}

SpectralDecomposition eigh(const HermitianMatrix& a) {
  if (!a.mat().allFinite()) throw InputError("eigh: non-finite matrix entries");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(a.mat());
  if (solver.info() != Eigen::Success) {
    const int budget = kEigenIterationsPerDim * a.dim();
    std::ostringstream os;
    os << "eigh: QR iteration did not converge within " << budget << " iterations (dim "
       << a.dim() << ")";
    throw ConvergenceError(os.str(), budget);
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianMatrix matrix_function(const SpectralDecomposition& s,
                                const std::function<double(double)>& f) {
  VectorXd fv(s.dim());
  for (int i = 0; i < s.dim(); ++i) {
    fv(i) = f(s.eigenvalues(i));
    if (!std::isfinite(fv(i))) {
      std::ostringstream os;
      os.precision(17);
      os << "matrix_function: function undefined at eigenvalue " << s.eigenvalues(i);
      throw DomainError(os.str());
    }
  }
  return s.reconstruct(fv);
}

HermitianMatrix matrix_function(const HermitianMatrix& a, const std::function<double(double)>& f) {
  return matrix_function(eigh(a), f);
}

double PairKernel::operator()(double p, double q) const {
  const double scale = std::max(std::abs(p), std::abs(q));
  if (std::abs(p - q) < 1e-12 * scale || p == q) return confluent(0.5 * (p + q));
  return value(p, q);
}

namespace kernels {

PairKernel identity() {
  return {"identity", [](double, double) { return 1.0; }, [](double) { return 1.0; }};
}

PairKernel arithmetic_mean() {
  return {"arithmetic_mean", [](double p, double q) { return 0.5 * (p + q); },
          [](double p) { return p; }};
}

// Both log-type kernels are written through log1p((p - q) / q) so that nearby
// eigenvalues do not lose digits to the subtraction log p - log q.
PairKernel logarithmic_mean() {
  return {"logarithmic_mean",
          [](double p, double q) {
            if (p <= 0.0 || q <= 0.0) return std::nan("");
            const double x = (p - q) / q;
            return q * x / std::log1p(x);
          },
          [](double p) { return p > 0.0 ? p : std::nan(""); }};
}

PairKernel log_difference_quotient() {
  return {"log_difference_quotient",
          [](double p, double q) {
            if (p <= 0.0 || q <= 0.0) return std::nan("");
            const double x = (p - q) / q;
            return std::log1p(x) / (q * x);
          },
          [](double p) { return p > 0.0 ? 1.0 / p : std::nan(""); }};
}

PairKernel sld() {
  return {"sld", [](double p, double q) { return 2.0 / (p + q); },
          [](double p) { return 1.0 / p; }};
}

}  // namespace kernels

HermitianMatrix kernel_apply(const SpectralDecomposition& rho, const HermitianMatrix& x,
                             const PairKernel& k) {
  if (x.dim() != rho.dim()) throw InputError("kernel_apply: dimension mismatch");
  MatrixXcd xt = rho.to_eigenbasis(x.mat());
  const int n = rho.dim();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double p = rho.eigenvalues(i);
      const double q = rho.eigenvalues(j);
      const double kv = k(p, q);
      if (!std::isfinite(kv)) {
        std::ostringstream os;
        os.precision(17);
        os << "kernel_apply: kernel '" << k.name << "' is not finite at (" << p << ", " << q
           << ")";
        throw DomainError(os.str());
      }
      xt(i, j) *= kv;
      if (i != j) xt(j, i) *= kv;
    }
  }
  return HermitianMatrix(rho.from_eigenbasis(xt));
}

}  // namespace infogeo
