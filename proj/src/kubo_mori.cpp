#include "infogeo/kubo_mori.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>

#include "infogeo/errors.hpp"

namespace infogeo {

double exp_divided_difference(const std::vector<double>& nodes_in) {
  const int n = static_cast<int>(nodes_in.size());
  if (n == 0) throw InputError("exp_divided_difference: no nodes");
  std::vector<double> nodes = nodes_in;
  std::sort(nodes.begin(), nodes.end());
  if (n == 1) return std::exp(nodes[0]);
  double mean = 0.0;
  for (double x : nodes) mean += x;
  mean /= n;

  // Opitz: exp of the bidiagonal matrix with the nodes on the diagonal and
  // ones above it carries exp[x_i..x_j] in entry (i, j). Every entry of
  // every power is nonnegative after the shift is removed, so squaring is
  // free of cancellation.
  MatrixXd a = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, i) = nodes[i] - mean;
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  const int s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / 0.25))));
  a /= std::ldexp(1.0, s);

  MatrixXd e = MatrixXd::Identity(n, n);
  MatrixXd term = MatrixXd::Identity(n, n);
  for (int k = 1; k < 40; ++k) {
    term = term * a / static_cast<double>(k);
    e += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18 * e.cwiseAbs().maxCoeff()) break;
  }
  for (int k = 0; k < s; ++k) e = e * e;
  return std::exp(mean) * e(0, n - 1);
}

double kubo_n_point(const DensityMatrix& rho0, const std::vector<HermitianMatrix>& vs) {
  const int n = static_cast<int>(vs.size());
  if (n < 1) throw InputError("kubo_n_point: need at least one operator");
  if (n > kKuboMaxPoints) {
    throw InputError("kubo_n_point: n = " + std::to_string(n) + " exceeds the limit of " +
                     std::to_string(kKuboMaxPoints));
  }
  const int d = rho0.dim();
  for (const auto& v : vs) {
    if (v.dim() != d) throw InputError("kubo_n_point: dimension mismatch");
  }
  const auto& spec = rho0.spectral();
  std::vector<double> logp(d);
  for (int i = 0; i < d; ++i) logp[i] = std::log(spec.eigenvalues(i));
  std::vector<MatrixXcd> vt;
  for (const auto& v : vs) vt.push_back(spec.to_eigenbasis(v.mat()));

  std::map<std::uint64_t, double> cache;
  std::vector<int> idx(n);
  auto weight = [&]() {
    std::vector<int> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t key = 0;
    for (int i : sorted) key = key * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(i);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<double> nodes;
    for (int i : sorted) nodes.push_back(logp[i]);
    return cache[key] = exp_divided_difference(nodes);
  };

  cplx total = 0.0;
  // depth-first over index tuples, carrying the product of matrix entries
  auto recurse = [&](auto&& self, int k, cplx prod) -> void {
    if (k == n) {
      total += prod * vt[n - 1](idx[n - 1], idx[0]) * weight();
      return;
    }
    for (int i = 0; i < d; ++i) {
      idx[k] = i;
      const cplx next = k == 0 ? cplx(1.0) : prod * vt[k - 1](idx[k - 1], i);
      if (next == cplx(0.0)) continue;
      self(self, k + 1, next);
    }
  };
  recurse(recurse, 0, cplx(1.0));
  return total.real();
}

const char* SeriesReport::convention() {
  return "Z_V/Z_0 = 1 + sum_n (-1)^n K_n/n with K_n the simplex-integrated n-point function "
         "of V in rho_0; terms[n] is the order-n coefficient of log(Z_V/Z_0), i.e. the connected "
         "part; terms[0] = log Z_0";
}

SeriesReport expand_log_z(const PerturbationProblem& prob) {
  if (prob.h0.dim() != prob.v.dim()) throw InputError("expand_log_z: H0 and V dimensions differ");
  if (prob.max_order < 1 || prob.max_order > 6) {
    throw InputError("expand_log_z: max_order must lie in [1, 6], got " +
                     std::to_string(prob.max_order));
  }
  const SpectralDecomposition s = eigh(prob.h0);
  VectorXd w = (-(s.eigenvalues.array() - s.eigenvalues(0))).exp();
  w /= w.sum();
  const DensityMatrix rho0(s.reconstruct(w));

  SeriesReport r;
  r.exact_log_z = log_partition(prob.h0 + prob.v);
  const int nmax = prob.max_order;
  std::vector<double> a(nmax + 1, 0.0), c(nmax + 1, 0.0);
  for (int k = 1; k <= nmax; ++k) {
    const std::vector<HermitianMatrix> vs(k, prob.v);
    a[k] = (k % 2 == 0 ? 1.0 : -1.0) * kubo_n_point(rho0, vs) / k;
  }
  for (int k = 1; k <= nmax; ++k) {
    double acc = 0.0;
    for (int j = 1; j < k; ++j) acc += j * c[j] * a[k - j];
    c[k] = a[k] - acc / k;
  }
  r.terms.push_back(log_partition(prob.h0));
  for (int k = 1; k <= nmax; ++k) r.terms.push_back(c[k]);
  double sum = 0.0;
  bool finite = true;
  for (double t : r.terms) {
    sum += t;
    finite = finite && std::isfinite(t);
    r.partial_sums.push_back(sum);
    r.truncation_errors.push_back(std::abs(r.exact_log_z - sum));
  }
  const double first = r.truncation_errors[1];
  const double last = r.truncation_errors.back();
  r.diverged = !finite || (last > first && first > 1e-12 * std::max(1.0, std::abs(r.exact_log_z)));
  return r;
}

MassieuDerivativeResidual massieu_derivative_check(const PerturbationProblem& prob) {
  if (prob.h0.dim() != prob.v.dim()) {
    throw InputError("massieu_derivative_check: H0 and V dimensions differ");
  }
  auto f = [&](double t) { return log_partition(prob.h0 + prob.v * t); };
  const VectorXd ev = eigh(prob.v).eigenvalues;
  const double vnorm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  const double h0 = 0.1 / std::max(1.0, vnorm);

  constexpr int depth = 4;
  double d1[depth][depth], d2[depth][depth];
  const double f0 = f(0.0);
  for (int i = 0; i < depth; ++i) {
    const double h = h0 / std::ldexp(1.0, i);
    const double fp = f(h), fm = f(-h);
    d1[i][0] = (fp - fm) / (2.0 * h);
    d2[i][0] = (fp - 2.0 * f0 + fm) / (h * h);
    for (int j = 1; j <= i; ++j) {
      const double scale = std::ldexp(1.0, 2 * j) - 1.0;
      d1[i][j] = d1[i][j - 1] + (d1[i][j - 1] - d1[i - 1][j - 1]) / scale;
      d2[i][j] = d2[i][j - 1] + (d2[i][j - 1] - d2[i - 1][j - 1]) / scale;
    }
  }
  MassieuDerivativeResidual r{};
  r.first_fd = d1[depth - 1][depth - 1];
  r.second_fd = d2[depth - 1][depth - 1];

  const SpectralDecomposition s = eigh(prob.h0);
  VectorXd w = (-(s.eigenvalues.array() - s.eigenvalues(0))).exp();
  w /= w.sum();
  const DensityMatrix rho0(s.reconstruct(w));
  const QuantumTangent x = make_score(rho0, prob.v);
  r.first = std::abs(r.first_fd + rho0.expectation(prob.v));
  r.second = std::abs(r.second_fd - bkm_metric(rho0, x, x));
  return r;
}

}  // namespace infogeo
