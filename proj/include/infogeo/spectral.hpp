#pragma once

#include <complex>
#include <functional>
#include <string>

#include <Eigen/Dense>

namespace infogeo {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Dense Hermitian matrix. Every construction from raw data is symmetrized
/// as (A + A^H) / 2, so the stored entries are exactly Hermitian.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const MatrixXcd& raw);
  explicit HermitianMatrix(const MatrixXd& raw);

  static HermitianMatrix zero(int dim);
  static HermitianMatrix identity(int dim);
  static HermitianMatrix diagonal(const VectorXd& diag);

  int dim() const { return static_cast<int>(m_.rows()); }
  const MatrixXcd& mat() const { return m_; }

  double trace() const { return m_.trace().real(); }
  double frobenius_norm() const { return m_.norm(); }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;
  friend HermitianMatrix operator*(double s, const HermitianMatrix& h) { return h * s; }

 private:
  MatrixXcd m_;
};

/// Re Tr[A B] for Hermitian A, B (the real Hilbert-Schmidt pairing).
double trace_product(const HermitianMatrix& a, const HermitianMatrix& b);

struct SpectralDecomposition {
  VectorXd eigenvalues;   // ascending
  MatrixXcd eigenvectors; // unitary, columns are eigenvectors

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  /// U diag(values) U^H
  HermitianMatrix reconstruct(const VectorXd& values) const;
  HermitianMatrix reconstruct() const { return reconstruct(eigenvalues); }
  /// U^H X U
  MatrixXcd to_eigenbasis(const MatrixXcd& x) const;
  /// U X U^H
  MatrixXcd from_eigenbasis(const MatrixXcd& x) const;
};

/// Full eigendecomposition. Throws ConvergenceError when the solver does not
/// converge, InputError on non-finite entries.
SpectralDecomposition eigh(const HermitianMatrix& a);

/// U f(Lambda) U^H. Throws DomainError naming the eigenvalue where f is not
/// finite (log of a nonpositive eigenvalue, for instance).
HermitianMatrix matrix_function(const HermitianMatrix& a,
                                const std::function<double(double)>& f);
HermitianMatrix matrix_function(const SpectralDecomposition& s,
                                const std::function<double(double)>& f);

/// A symmetric two-argument kernel k(p, q) on eigenvalue pairs together with
/// its confluent limit k(p, p). The limit is used whenever
/// |p - q| < 1e-12 * max(|p|, |q|).
struct PairKernel {
  std::string name;
  std::function<double(double, double)> value;
  std::function<double(double)> confluent;

  double operator()(double p, double q) const;
};

namespace kernels {
PairKernel identity();
/// (p + q) / 2, the GNS kernel.
PairKernel arithmetic_mean();
/// (p - q) / (log p - log q) = int_0^1 p^a q^(1-a) da, the BKM kernel.
PairKernel logarithmic_mean();
/// (log p - log q) / (p - q), the inverse of the BKM kernel.
PairKernel log_difference_quotient();
/// 2 / (p + q), solves the symmetric Lyapunov equation of the SLD.
PairKernel sld();
}  // namespace kernels

/// result_ij = k(p_i, p_j) * x~_ij in the eigenbasis of rho, rotated back.
HermitianMatrix kernel_apply(const SpectralDecomposition& rho, const HermitianMatrix& x,
                             const PairKernel& k);

}  // namespace infogeo
