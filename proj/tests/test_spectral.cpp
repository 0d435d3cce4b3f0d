#include <doctest.h>

#include <cmath>

#include "infogeo/errors.hpp"
#include "infogeo/spectral.hpp"
#include "oracles.hpp"

using namespace infogeo;

TEST_CASE("hermitian construction symmetrizes and validates") {
  MatrixXcd raw(2, 2);
  raw << 1.0, cplx(2.0, 1.0), cplx(0.0, 0.0), 3.0;
  const HermitianMatrix h(raw);
  CHECK(h.mat()(0, 1) == std::conj(h.mat()(1, 0)));
  CHECK(h.mat()(0, 1) == cplx(1.0, 0.5));

  CHECK_THROWS_AS(HermitianMatrix(MatrixXd(2, 3)), InputError);
  CHECK_THROWS_AS(HermitianMatrix(MatrixXd(0, 0)), InputError);
  MatrixXd bad = MatrixXd::Identity(2, 2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(HermitianMatrix{bad}, InputError);
}

TEST_CASE("eigh examples") {
  const auto id = eigh(HermitianMatrix::identity(3));
  CHECK((id.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-15);

  const auto d = eigh(HermitianMatrix::diagonal(Eigen::Vector3d(3.0, 1.0, 2.0)));
  CHECK(d.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(d.eigenvalues(1) == doctest::Approx(2.0));
  CHECK(d.eigenvalues(2) == doctest::Approx(3.0));

  const auto px = eigh(HermitianMatrix(oracle::pauli_x()));
  CHECK(px.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(px.eigenvalues(1) == doctest::Approx(1.0));
}

TEST_CASE("eigh reconstruction and unitarity on random inputs") {
  oracle::Rng r(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = r.integer(1, 8);
    const HermitianMatrix a(oracle::random_hermitian(r, n));
    const auto s = eigh(a);
    CHECK((s.reconstruct().mat() - a.mat()).norm() <= 1e-10 * std::max(1.0, a.frobenius_norm()));
    CHECK((s.eigenvectors.adjoint() * s.eigenvectors - MatrixXcd::Identity(n, n)).norm() <= 1e-10);
    for (int i = 1; i < n; ++i) CHECK(s.eigenvalues(i - 1) <= s.eigenvalues(i));
  }
}

TEST_CASE("matrix_function examples") {
  const auto l = matrix_function(HermitianMatrix::diagonal(Eigen::Vector2d(1.0, std::exp(1.0))),
                                 [](double x) { return std::log(x); });
  CHECK(std::abs(l.mat()(0, 0)) < 1e-15);
  CHECK(l.mat()(1, 1).real() == doctest::Approx(1.0).epsilon(1e-15));

  const auto p = matrix_function(HermitianMatrix::identity(4), [](double x) { return std::pow(x, 0.37); });
  CHECK((p.mat() - MatrixXcd::Identity(4, 4)).norm() < 1e-14);

  oracle::Rng r(5);
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianMatrix a(oracle::random_hermitian(r, r.integer(2, 6)));
    const auto e = matrix_function(a, [](double x) { return std::exp(x); });
    const auto back = matrix_function(e, [](double x) { return std::log(x); });
    CHECK((back.mat() - a.mat()).norm() < 1e-10);
    // Jensen floor
    CHECK(e.trace() >= a.dim() * std::exp(eigh(a).eigenvalues(0)) - 1e-12);
  }
}

TEST_CASE("matrix_function names the offending eigenvalue") {
  const HermitianMatrix a = HermitianMatrix::diagonal(Eigen::Vector2d(-0.5, 2.0));
  try {
    matrix_function(a, [](double x) { return std::log(x); });
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("-0.5") != std::string::npos);
  }
}

TEST_CASE("kernel_apply examples") {
  oracle::Rng r(3);
  const HermitianMatrix x(oracle::random_hermitian(r, 3));
  const auto rho = eigh(HermitianMatrix(MatrixXcd(oracle::random_density(r, 3).mat())));
  CHECK((kernel_apply(rho, x, kernels::identity()).mat() - x.mat()).norm() < 1e-13);

  const auto flat = eigh(HermitianMatrix::identity(3) * (1.0 / 3.0));
  const auto y = kernel_apply(flat, x, kernels::logarithmic_mean());
  CHECK((y.mat() - x.mat() / 3.0).norm() < 1e-14);

  // diag(e, 1), Pauli-x: off-diagonals scaled by (e - 1) / (1 - 0) = e - 1
  const auto de = eigh(HermitianMatrix::diagonal(Eigen::Vector2d(std::exp(1.0), 1.0)));
  const auto z = kernel_apply(de, HermitianMatrix(oracle::pauli_x()), kernels::logarithmic_mean());
  CHECK(z.mat()(0, 1).real() == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  CHECK(std::abs(z.mat()(0, 0)) < 1e-15);
  const double quad = oracle::integrate01(
      [](double a) { return std::pow(std::exp(1.0), a) * std::pow(1.0, 1.0 - a); });
  CHECK(quad == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("kernel confluent limits") {
  const auto lm = kernels::logarithmic_mean();
  const auto ld = kernels::log_difference_quotient();
  CHECK(lm(0.3, 0.3) == doctest::Approx(0.3));
  CHECK(ld(0.25, 0.25) == doctest::Approx(4.0));
  CHECK(lm(0.3, 0.3 * (1 + 1e-13)) == doctest::Approx(0.3));
  // continuity across the switch point
  CHECK(lm(0.3, 0.3 * (1 + 1e-11)) == doctest::Approx(0.3 * (1 + 0.5e-11)).epsilon(1e-14));
  CHECK(kernels::sld()(0.5, 0.5) == doctest::Approx(2.0));
  CHECK(kernels::arithmetic_mean()(0.2, 0.6) == doctest::Approx(0.4));
  CHECK(std::isnan(ld(-0.1, 0.5)));
}

TEST_CASE("kernel_apply is linear and names non-finite pairs") {
  oracle::Rng r(8);
  const auto rho = oracle::random_density(r, 4).spectral();
  const HermitianMatrix x(oracle::random_hermitian(r, 4)), y(oracle::random_hermitian(r, 4));
  const auto k = kernels::logarithmic_mean();
  const auto lhs = kernel_apply(rho, x * 2.5 + y * (-1.25), k);
  const auto rhs = kernel_apply(rho, x, k) * 2.5 + kernel_apply(rho, y, k) * (-1.25);
  CHECK((lhs.mat() - rhs.mat()).norm() < 1e-12);

  const auto neg = eigh(HermitianMatrix::diagonal(Eigen::Vector2d(-1.0, 1.0)));
  CHECK_THROWS_AS(kernel_apply(neg, HermitianMatrix(oracle::pauli_x()),
                               kernels::log_difference_quotient()),
                  DomainError);
}

TEST_CASE("logarithmic-mean kernel matches quadrature of the operator integral") {
  oracle::Rng r(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = r.integer(2, 6);
    const auto rho = oracle::random_density(r, d);
    const HermitianMatrix x(oracle::random_hermitian(r, d));
    const auto k = kernel_apply(rho.spectral(), x, kernels::logarithmic_mean());
    const MatrixXcd q = oracle::bkm_operator_quadrature(rho.mat(), x.mat());
    CHECK((k.mat() - q).cwiseAbs().maxCoeff() < 1e-8);
  }
}
