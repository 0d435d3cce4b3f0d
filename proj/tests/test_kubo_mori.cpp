#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "infogeo/errors.hpp"
#include "infogeo/kubo_mori.hpp"
#include "oracles.hpp"

using namespace infogeo;

namespace {

double log_z(const HermitianMatrix& h) {
  const MatrixXcd m = -h.mat();
  return std::log(MatrixXcd(m.exp()).trace().real());
}

}  // namespace

TEST_CASE("exponential divided differences") {
  CHECK(exp_divided_difference({0.7}) == doctest::Approx(std::exp(0.7)).epsilon(1e-15));
  CHECK(exp_divided_difference({0.2, -1.1}) ==
        doctest::Approx((std::exp(0.2) - std::exp(-1.1)) / 1.3).epsilon(1e-14));
  CHECK(exp_divided_difference({0.4, 0.4, 0.4}) == doctest::Approx(std::exp(0.4) / 2).epsilon(1e-14));
  const double a = -0.3, b = 0.5, c = 1.9;
  const double ab = (std::exp(a) - std::exp(b)) / (a - b), bc = (std::exp(b) - std::exp(c)) / (b - c);
  CHECK(exp_divided_difference({a, b, c}) == doctest::Approx((ab - bc) / (a - c)).epsilon(1e-13));
  // nearly confluent nodes: the naive formula cancels, the Taylor limit does not
  const double e = 1e-10;
  CHECK(exp_divided_difference({1.0, 1.0 + e}) == doctest::Approx(std::exp(1.0 + e / 2)).epsilon(1e-14));
  CHECK(exp_divided_difference({-2.0, -2.0 + e, -2.0 - e, -2.0}) ==
        doctest::Approx(std::exp(-2.0) / 6).epsilon(1e-12));
  // very spread nodes stay positive and finite
  const double far = exp_divided_difference({-60.0, 0.0, 0.1, -30.0});
  CHECK(far > 0.0);
  CHECK(std::isfinite(far));
}

TEST_CASE("n-point examples") {
  oracle::Rng r(3);
  const auto rho = oracle::random_density(r, 4);
  const HermitianMatrix v(oracle::random_hermitian(r, 4));
  CHECK(kubo_n_point(rho, {v}) == doctest::Approx(rho.expectation(v)).epsilon(1e-13));

  const HermitianMatrix centred = make_score(rho, v).matrix;
  const auto s = make_score(rho, v);
  CHECK(kubo_n_point(rho, {centred, centred}) == doctest::Approx(bkm_metric(rho, s, s)).epsilon(1e-10));
  CHECK(kubo_n_point(rho, {HermitianMatrix::identity(4), HermitianMatrix::identity(4)}) ==
        doctest::Approx(1.0).epsilon(1e-14));
  // all identities: the simplex volume 1/(n-1)!
  std::vector<HermitianMatrix> ids(5, HermitianMatrix::identity(4));
  CHECK(kubo_n_point(rho, ids) == doctest::Approx(1.0 / 24.0).epsilon(1e-13));

  CHECK_THROWS_AS(kubo_n_point(rho, {}), InputError);
  CHECK_THROWS_AS(kubo_n_point(rho, std::vector<HermitianMatrix>(9, v)), InputError);
}

TEST_CASE("qubit closed forms") {
  const double p1 = 0.7, p2 = 0.3;
  const DensityMatrix rho(HermitianMatrix::diagonal(Eigen::Vector2d(p1, p2)));
  const HermitianMatrix x(oracle::pauli_x());
  const double lm = (p1 - p2) / (std::log(p1) - std::log(p2));
  CHECK(kubo_n_point(rho, {x, x}) == doctest::Approx(2 * lm).epsilon(1e-14));

  // diagonal V: sum_i p_i v_i^n / (n - 1)!
  const Eigen::Vector2d d(0.4, -1.3);
  const auto vd = HermitianMatrix::diagonal(d);
  for (int n = 1; n <= 5; ++n) {
    double expected = p1 * std::pow(d(0), n) + p2 * std::pow(d(1), n);
    expected /= std::tgamma(static_cast<double>(n));
    CHECK(kubo_n_point(rho, std::vector<HermitianMatrix>(n, vd)) == doctest::Approx(expected).epsilon(1e-13));
  }

  // x z x: Tr[rho^a1 X rho^a2 Z rho^a3 X] picks the 1->2->2->1 and 2->1->1->2 paths
  const HermitianMatrix z(oracle::pauli_z());
  const double l1 = std::log(p1), l2 = std::log(p2);
  const double expected =
      exp_divided_difference({l1, l2, l2}) * (-1.0) + exp_divided_difference({l2, l1, l1}) * 1.0;
  CHECK(kubo_n_point(rho, {x, z, x}) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("cyclicity, linearity and the simplex Monte Carlo oracle") {
  oracle::Rng r(17);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = r.integer(2, 5), n = r.integer(2, 5);
    const auto rho = oracle::random_density(r, d, 0.02);
    std::vector<HermitianMatrix> vs;
    for (int k = 0; k < n; ++k) vs.emplace_back(oracle::random_hermitian(r, d));
    const double base = kubo_n_point(rho, vs);
    std::vector<HermitianMatrix> rot(vs.begin() + 1, vs.end());
    rot.push_back(vs.front());
    CHECK(kubo_n_point(rho, rot) == doctest::Approx(base).epsilon(1e-10));

    const HermitianMatrix w(oracle::random_hermitian(r, d));
    auto mixed = vs;
    mixed[0] = vs[0] * 2.0 + w * (-0.5);
    auto only_w = vs;
    only_w[0] = w;
    CHECK(kubo_n_point(rho, mixed) ==
          doctest::Approx(2.0 * base - 0.5 * kubo_n_point(rho, only_w)).epsilon(1e-10));
  }

  const auto rho = oracle::random_density(r, 3, 0.05);
  std::vector<MatrixXcd> v;
  std::vector<HermitianMatrix> vh;
  for (int k = 0; k < 3; ++k) {
    v.push_back(oracle::random_hermitian(r, 3));
    vh.emplace_back(v.back());
  }
  const MatrixXcd logr = MatrixXcd(rho.mat()).log();
  const int m = 100000;
  double bound = 1.0;
  for (const auto& x : v) bound *= x.operatorNorm();
  const double mc = oracle::simplex_monte_carlo(
      3,
      [&](const std::vector<double>& a) {
        MatrixXcd prod = MatrixXcd::Identity(3, 3);
        for (int k = 0; k < 3; ++k) {
          const MatrixXcd l = a[k] * logr;
          prod = prod * MatrixXcd(l.exp()) * v[k];
        }
        return prod.trace().real();
      },
      m, 99);
  CHECK(std::abs(kubo_n_point(rho, vh) - mc) < 4.0 * bound / std::sqrt(m) / 2.0);
}

TEST_CASE("log Z series basics") {
  oracle::Rng r(5);
  const HermitianMatrix h0(oracle::random_hermitian(r, 4));
  const auto zero = expand_log_z({h0, HermitianMatrix::zero(4), 4});
  CHECK(zero.exact_log_z == doctest::Approx(log_z(h0)).epsilon(1e-13));
  for (std::size_t k = 1; k < zero.terms.size(); ++k) CHECK(std::abs(zero.terms[k]) < 1e-15);

  const double c = 0.37;
  const auto shift = expand_log_z({h0, HermitianMatrix::identity(4) * c, 5});
  CHECK(shift.terms.size() == 6);
  CHECK(shift.exact_log_z == doctest::Approx(log_z(h0) - c).epsilon(1e-13));
  CHECK(shift.terms[1] == doctest::Approx(-c).epsilon(1e-13));
  for (std::size_t k = 2; k < shift.terms.size(); ++k) CHECK(std::abs(shift.terms[k]) < 1e-12);
  for (std::size_t k = 0; k < shift.terms.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j <= k; ++j) s += shift.terms[j];
    CHECK(shift.partial_sums[k] == doctest::Approx(s).epsilon(1e-15));
    CHECK(shift.truncation_errors[k] == doctest::Approx(std::abs(shift.exact_log_z - s)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(expand_log_z({h0, HermitianMatrix::zero(4), 7}), InputError);
  CHECK_THROWS_AS(expand_log_z({h0, HermitianMatrix::zero(3), 2}), InputError);
  CHECK(std::string(SeriesReport::convention()).size() > 0);
}

TEST_CASE("order-3 truncation error scales as t^4") {
  oracle::Rng r(29);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = r.integer(2, 6);
    const HermitianMatrix h0(oracle::random_hermitian(r, d));
    const HermitianMatrix v(oracle::random_hermitian(r, d));
    std::vector<double> lt, le;
    for (double t : {0.04, 0.02, 0.01}) {
      const auto rep = expand_log_z({h0, v * t, 4});
      lt.push_back(std::log(t));
      le.push_back(std::log(rep.truncation_errors[3]));
      for (std::size_t k = 1; k < rep.truncation_errors.size(); ++k) {
        CHECK(rep.truncation_errors[k] <= rep.truncation_errors[k - 1]);
      }
      CHECK(!rep.diverged);
    }
    const double mt = (lt[0] + lt[1] + lt[2]) / 3, me = (le[0] + le[1] + le[2]) / 3;
    double num = 0, den = 0;
    for (int k = 0; k < 3; ++k) {
      num += (lt[k] - mt) * (le[k] - me);
      den += (lt[k] - mt) * (lt[k] - mt);
    }
    CHECK(num / den == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("large perturbations are flagged, not thrown") {
  oracle::Rng r(2);
  const HermitianMatrix h0(oracle::random_hermitian(r, 3));
  const HermitianMatrix v(oracle::random_hermitian(r, 3));
  const auto rep = expand_log_z({h0, v * 40.0, 6});
  CHECK(rep.diverged);
}

TEST_CASE("Massieu derivative checks") {
  oracle::Rng r(43);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = r.integer(2, 6);
    const auto res = massieu_derivative_check({HermitianMatrix(oracle::random_hermitian(r, d)),
                                               HermitianMatrix(oracle::random_hermitian(r, d)), 4});
    CHECK(res.first <= 1e-6);
    CHECK(res.second <= 1e-6);
  }
  // commuting: classical cumulants
  const auto comm = massieu_derivative_check(
      {HermitianMatrix::diagonal(Eigen::Vector3d(0.1, -0.4, 1.0)),
       HermitianMatrix::diagonal(Eigen::Vector3d(0.5, 0.2, -0.7)), 4});
  CHECK(comm.first <= 1e-10);
  CHECK(comm.second <= 1e-10);

  // flat rho0 and centred V: second derivative Tr[V^2] / d
  const int d = 4;
  HermitianMatrix v(oracle::random_hermitian(r, d));
  v = v - HermitianMatrix::identity(d) * (v.trace() / d);
  const auto flat = massieu_derivative_check({HermitianMatrix::zero(d), v, 4});
  CHECK(flat.second_fd == doctest::Approx((v.mat() * v.mat()).trace().real() / d).epsilon(1e-8));

  const auto none = massieu_derivative_check({HermitianMatrix::zero(3), HermitianMatrix::zero(3), 4});
  CHECK(none.first == 0.0);
  CHECK(none.second == 0.0);
}
