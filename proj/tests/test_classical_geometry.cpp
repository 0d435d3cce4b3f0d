#include <doctest.h>

#include <cmath>

#include "infogeo/classical_estimation.hpp"
#include "infogeo/classical_geometry.hpp"
#include "infogeo/errors.hpp"
#include "oracles.hpp"

using namespace infogeo;

namespace {

double kl(const VectorXd& p, const VectorXd& q) {
  return (p.array() * (p.array() / q.array()).log()).sum();
}

std::shared_ptr<const ExponentialFamily> coin() {
  MatrixXd f(2, 1);
  f << 0.0, 1.0;
  return std::make_shared<const ExponentialFamily>(f);
}

// indicator features of the first n-1 outcomes: the whole simplex
std::shared_ptr<const ExponentialFamily> full_simplex(int omega) {
  MatrixXd f = MatrixXd::Zero(omega, omega - 1);
  for (int j = 0; j < omega - 1; ++j) f(j, j) = 1.0;
  return std::make_shared<const ExponentialFamily>(f);
}

}  // namespace

TEST_CASE("distribution validation") {
  CHECK_THROWS_AS(FiniteDistribution(Eigen::Vector2d(0.5, 0.6)), InputError);
  CHECK_THROWS_AS(FiniteDistribution(Eigen::Vector2d(1.0, 0.0)), InputError);
  CHECK_NOTHROW(FiniteDistribution(Eigen::Vector2d(1.0, 0.0), Boundary::allow));
  CHECK_THROWS_AS(FiniteDistribution(Eigen::Vector2d(1.5, -0.5), Boundary::allow), InputError);
}

TEST_CASE("family validation") {
  MatrixXd dep(3, 2);
  dep << 0.0, 0.0, 1.0, 2.0, 2.0, 4.0;
  CHECK_THROWS_AS(ExponentialFamily{dep}, InputError);
  CHECK_THROWS_AS(ExponentialFamily(MatrixXd::Identity(2, 2)), InputError);  // n < |omega|
  MatrixXd constant(3, 1);
  constant << 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(ExponentialFamily{constant}, InputError);
}

TEST_CASE("fisher metric examples") {
  const auto half = FiniteDistribution::uniform(2);
  const ClassicalTangent zero{TangentRep::exponential, VectorXd::Zero(2)};
  CHECK(fisher_metric(half, zero, zero) == 0.0);

  // Bernoulli in the mean coordinate: d rho / d eta = (-1, 1)
  const ClassicalTangent dir{TangentRep::mixture, Eigen::Vector2d(-1.0, 1.0)};
  CHECK(fisher_metric(half, dir, dir) == doctest::Approx(4.0).epsilon(1e-14));
  // KL oracle: d^2 KL(rho_eta || rho_{eta+e}) / de^2 at 0
  const double e = 1e-4;
  const VectorXd p = half.probs();
  const double d2 = (kl(p, p + e * dir.vec) - 2.0 * kl(p, p) + kl(p, p - e * dir.vec)) / (e * e);
  CHECK(d2 == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("fisher matrix of the full simplex at uniform matches the KL oracle") {
  const int omega = 3;
  const auto u = FiniteDistribution::uniform(omega);
  // coordinates: the first two probabilities, the third = 1 - sum
  std::vector<VectorXd> dirs = {Eigen::Vector3d(1.0, 0.0, -1.0), Eigen::Vector3d(0.0, 1.0, -1.0)};
  const double e = 1e-4;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double g = fisher_metric(u, {TangentRep::mixture, dirs[i]}, {TangentRep::mixture, dirs[j]});
      auto f = [&](double a, double b) { return kl(u.probs(), u.probs() + a * dirs[i] + b * dirs[j]); };
      const double fd = (f(e, e) - f(e, -e) - f(-e, e) + f(-e, -e)) / (4 * e * e);
      const double expected = i == j ? 6.0 : 3.0;  // 3 I + 3 J
      CHECK(g == doctest::Approx(expected).epsilon(1e-13));
      CHECK(fd == doctest::Approx(g).epsilon(1e-6));
    }
  }
}

TEST_CASE("tangent conversion") {
  const auto u = FiniteDistribution::uniform(2);
  const double a = 0.3;
  const auto s = tangent_convert(u, {TangentRep::mixture, Eigen::Vector2d(a, -a)}, TangentRep::exponential);
  CHECK(s.vec(0) == doctest::Approx(2 * a));
  CHECK(s.vec(1) == doctest::Approx(-2 * a));
  const auto z = tangent_convert(u, {TangentRep::mixture, VectorXd::Zero(2)}, TangentRep::exponential);
  CHECK(z.vec.norm() == 0.0);

  oracle::Rng r(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = r.integer(2, 10);
    const FiniteDistribution rho(oracle::random_probs(r, n, 0.01));
    VectorXd v = oracle::random_vector(r, n);
    v.array() -= v.mean();
    const ClassicalTangent m{TangentRep::mixture, v};
    const auto e = tangent_convert(rho, m, TangentRep::exponential);
    CHECK(std::abs(rho.expectation(e.vec)) < 1e-12);
    const auto back = tangent_convert(rho, e, TangentRep::mixture);
    CHECK((back.vec - v).cwiseAbs().maxCoeff() < 1e-12);
    // the pairing sum v x is representation independent
    VectorXd y = oracle::random_vector(r, n);
    y.array() -= rho.expectation(y);
    const ClassicalTangent ye{TangentRep::exponential, y};
    CHECK(v.dot(y) == doctest::Approx(fisher_metric(rho, m, ye)).epsilon(1e-12));
    CHECK(fisher_metric(rho, e, e) >= 0.0);
  }
}

TEST_CASE("massieu, means and covariance") {
  const CanonicalPoint c0(coin(), VectorXd::Zero(1));
  CHECK(massieu(c0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(mixture_coords(c0)(0) == doctest::Approx(0.5));
  CHECK(covariance(c0)(0, 0) == doctest::Approx(0.25));

  oracle::Rng r(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int omega = r.integer(3, 12), n = r.integer(1, std::min(4, omega - 1));
    const auto fam = oracle::random_family(r, omega, n, trial % 2 == 0);
    const CanonicalPoint pt(fam, oracle::random_vector(r, n, 0.7));
    const VectorXd eta = mixture_coords(pt);
    const MatrixXd v = covariance(pt);
    for (int j = 0; j < n; ++j) {
      const double h = 1e-5;
      VectorXd up = pt.xi(), down = pt.xi();
      up(j) += h;
      down(j) -= h;
      const double fd = (CanonicalPoint(fam, up).psi() - CanonicalPoint(fam, down).psi()) / (2 * h);
      CHECK(fd == doctest::Approx(-eta(j)).epsilon(1e-6));
    }
    CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(v).eigenvalues()(0) >= -1e-10);
    // V times the Fisher matrix of the mixture parametrization is I
    const auto mix = ParametricFamily::exponential_mixture(fam);
    const MatrixXd g = fisher_information_matrix(mix, eta);
    CHECK((v * g - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("log-sum-exp keeps extreme canonical points finite") {
  const CanonicalPoint far(coin(), VectorXd::Constant(1, 800.0));
  CHECK(std::isfinite(far.psi()));
  CHECK(far.probs()(1) < 1e-300);
}

TEST_CASE("entropy and the Legendre pair") {
  CHECK(entropy(FiniteDistribution::uniform(5)) == doctest::Approx(std::log(5.0)));
  const double eps = 1e-9;
  const FiniteDistribution nearly(Eigen::Vector2d(1.0 - eps, eps), Boundary::allow);
  CHECK(entropy(nearly) < 3e-8);
  CHECK(entropy(FiniteDistribution(Eigen::Vector2d(1.0, 0.0), Boundary::allow)) == 0.0);

  const CanonicalPoint c0(coin(), VectorXd::Zero(1));
  const auto lc = legendre_check(c0);
  CHECK(lc.value < 1e-15);

  oracle::Rng r(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int omega = r.integer(3, 10), n = r.integer(1, std::min(3, omega - 1));
    const auto fam = oracle::random_family(r, omega, n, trial % 3 == 0);
    const CanonicalPoint pt(fam, oracle::random_vector(r, n, 0.5));
    const auto res = legendre_check(pt);
    CHECK(res.value < 1e-12);
    CHECK(res.gradient < 1e-6);
  }
}

TEST_CASE("sphere embedding and distances") {
  const auto u4 = FiniteDistribution::uniform(4);
  const VectorXd e = alpha_embed(u4, 0.0);
  CHECK((e.array() - 0.5).abs().maxCoeff() < 1e-15);
  CHECK(e.norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(alpha_embed(u4, 1.0), DomainError);
  CHECK_THROWS_AS(alpha_embed(u4, 1.5), InputError);

  CHECK(hellinger_distance(u4, u4) == 0.0);
  const double eps = 1e-14;
  const FiniteDistribution a(Eigen::Vector2d(1 - eps, eps), Boundary::allow);
  const FiniteDistribution b(Eigen::Vector2d(eps, 1 - eps), Boundary::allow);
  CHECK(hellinger_distance(a, b) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));

  oracle::Rng r(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = r.integer(2, 8);
    const FiniteDistribution p(oracle::random_probs(r, n)), q(oracle::random_probs(r, n));
    const double bc = (p.probs().array() * q.probs().array()).sqrt().sum();
    CHECK(std::pow(hellinger_distance(p, q), 2) == doctest::Approx(2.0 - 2.0 * bc).epsilon(1e-12));
    CHECK(bhattacharyya_angle(p, q) == doctest::Approx(std::acos(bc)).epsilon(1e-12));
  }
}

TEST_CASE("skewness tensor and Christoffel symbols") {
  const CanonicalPoint c0(coin(), VectorXd::Zero(1));
  for (double a : {-1.0, 0.0, 0.5}) CHECK(std::abs(christoffel(c0, a)[0](0, 0)) < 1e-15);

  oracle::Rng r(14);
  for (int trial = 0; trial < 10; ++trial) {
    const int omega = r.integer(4, 9), n = r.integer(2, 3);
    const auto fam = oracle::random_family(r, omega, n);
    const CanonicalPoint pt(fam, oracle::random_vector(r, n, 0.5));
    const Tensor3 t = skewness_tensor(pt);
    const Tensor3 g1 = christoffel(pt, 1.0);
    for (const auto& m : g1) CHECK(m.cwiseAbs().maxCoeff() == 0.0);
    // full symmetry, and d_k V_ij = -T_ijk by finite differences
    const double h = 1e-5;
    for (int k = 0; k < n; ++k) {
      VectorXd up = pt.xi(), down = pt.xi();
      up(k) += h;
      down(k) -= h;
      const MatrixXd dv = (covariance(CanonicalPoint(fam, up)) - covariance(CanonicalPoint(fam, down))) / (2 * h);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          CHECK(t[k](i, j) == doctest::Approx(t[i](j, k)).epsilon(1e-12));
          CHECK(dv(i, j) == doctest::Approx(-t[k](i, j)).epsilon(1e-6));
        }
    }
    // lowered symbols: V Gamma^k = -(1 - alpha)/2 T
    const double alpha = -0.3;
    const Tensor3 g = christoffel(pt, alpha);
    const MatrixXd v = covariance(pt);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        VectorXd raised(n), lowered(n);
        for (int k = 0; k < n; ++k) raised(k) = g[k](i, j);
        for (int k = 0; k < n; ++k) lowered(k) = -0.5 * (1 - alpha) * t[k](i, j);
        CHECK((v * raised - lowered).cwiseAbs().maxCoeff() < 1e-12);
      }
  }
}

TEST_CASE("geodesics: e-lines, m-lines and reversal") {
  oracle::Rng r(31);
  const auto fam = oracle::random_family(r, 5, 2);
  const CanonicalPoint start(fam, Eigen::Vector2d(0.2, -0.1));
  const Eigen::Vector2d v(0.4, 0.3);

  const auto plus = geodesic(start, v, 1.0, 1.0, 1e-2);
  for (std::size_t k = 0; k < plus.points.size(); ++k) {
    CHECK((plus.points[k].xi() - (start.xi() + plus.t[k] * v)).cwiseAbs().maxCoeff() < 1e-14);
  }

  const auto minus = geodesic(start, v, -1.0, 1.0);
  const VectorXd eta0 = mixture_coords(minus.points.front());
  const VectorXd eta1 = mixture_coords(minus.points.back());
  for (std::size_t k = 0; k < minus.points.size(); k += 50) {
    const VectorXd expect = eta0 + minus.t[k] / minus.t.back() * (eta1 - eta0);
    CHECK((mixture_coords(minus.points[k]) - expect).cwiseAbs().maxCoeff() < 1e-6);
  }
  // initial velocity in eta is -V v
  CHECK(((eta1 - eta0) + covariance(start) * v).cwiseAbs().maxCoeff() < 1e-6);

  const auto zero = geodesic(start, v, 0.0, 0.8);
  const CanonicalPoint end = zero.points.back();
  // reverse: integrate back with the negated final velocity
  const auto& pts = zero.points;
  const std::size_t m = pts.size();
  const VectorXd vend = (3.0 * pts[m - 1].xi() - 4.0 * pts[m - 2].xi() + pts[m - 3].xi()) / (2e-3);
  const auto back = geodesic(end, -vend, 0.0, 0.8);
  CHECK((back.points.back().xi() - start.xi()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("geodesic truncates at the coordinate box") {
  const CanonicalPoint c0(coin(), VectorXd::Zero(1));
  const auto path = geodesic(c0, VectorXd::Constant(1, 10.0), 1.0, 10.0, 1e-2, {5.0});
  CHECK(path.truncated);
  CHECK(path.points.back().xi().cwiseAbs().maxCoeff() <= 5.0);
}

TEST_CASE("alpha = 0 geodesic on the full simplex follows the root-density great circle") {
  const auto fam = full_simplex(3);
  const CanonicalPoint start(fam, Eigen::Vector2d(0.3, -0.2));
  const auto path = geodesic(start, Eigen::Vector2d(0.5, 0.9), 0.0, 1.0);
  const VectorXd u0 = start.probs().cwiseSqrt();
  const VectorXd u1 = path.points.back().probs().cwiseSqrt();
  MatrixXd basis(3, 2);
  basis.col(0) = u0;
  basis.col(1) = (u1 - u0.dot(u1) * u0).normalized();
  for (const auto& p : path.points) {
    const VectorXd u = p.probs().cwiseSqrt();
    CHECK((u - basis * (basis.transpose() * u)).norm() < 1e-5);
  }
  // constant speed in the great-circle angle
  const double total = std::acos(std::min(1.0, u0.dot(u1)));
  const VectorXd um = path.points[path.points.size() / 2].probs().cwiseSqrt();
  CHECK(std::acos(std::min(1.0, u0.dot(um))) == doctest::Approx(total / 2).epsilon(1e-5));
}

TEST_CASE("parallel transports") {
  oracle::Rng r(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = r.integer(2, 8);
    const FiniteDistribution rho(oracle::random_probs(r, n, 0.02)), sigma(oracle::random_probs(r, n, 0.02));
    VectorXd x = oracle::random_vector(r, n), v = oracle::random_vector(r, n);
    x.array() -= rho.expectation(x);
    v.array() -= v.mean();
    const ClassicalTangent xe{TangentRep::exponential, x}, vm{TangentRep::mixture, v};
    const auto up = parallel_transport(rho, sigma, xe, Connection::plus);
    const auto um = parallel_transport(rho, sigma, vm, Connection::minus);
    CHECK(std::abs(sigma.expectation(up.vec)) < 1e-12);
    CHECK(std::abs(fisher_metric(sigma, up, um) - fisher_metric(rho, xe, vm)) < 1e-12);

    const auto same = parallel_transport(rho, rho, xe, Connection::plus);
    CHECK((same.vec - x).cwiseAbs().maxCoeff() < 1e-14);
    const auto same_m = parallel_transport(rho, rho, vm, Connection::minus);
    CHECK((same_m.vec - v).cwiseAbs().maxCoeff() < 1e-14);
  }
}
