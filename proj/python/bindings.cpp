#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "infogeo/classical_estimation.hpp"
#include "infogeo/errors.hpp"
#include "infogeo/kubo_mori.hpp"
#include "infogeo/monotonicity.hpp"
#include "infogeo/projection.hpp"
#include "infogeo/quantum_geometry.hpp"

namespace py = pybind11;
using namespace infogeo;

namespace {

std::shared_ptr<const ExponentialFamily> family(const MatrixXd& features, const std::optional<VectorXd>& base) {
  return std::make_shared<const ExponentialFamily>(features, base);
}

QuantumInfo parse_info(const std::string& s) {
  for (auto q : kAllQuantumInfos)
    if (s == to_string(q)) return q;
  throw InputError("unknown information '" + s + "': expected gns_sld, bkm or right");
}

DensityMatrix density(const MatrixXcd& m) { return DensityMatrix(HermitianMatrix(m)); }

py::dict point_dict(const CanonicalPoint& pt) {
  py::dict d;
  d["xi"] = pt.xi();
  d["eta"] = mixture_coords(pt);
  d["probs"] = pt.probs();
  d["psi"] = pt.psi();
  d["entropy"] = entropy(pt.to_distribution());
  return d;
}

}  // namespace

PYBIND11_MODULE(_infogeo, m) {
  m.doc() = "Numerical information geometry on finite classical and quantum state spaces";

  static py::exception<DomainError> domain_error(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const DomainError& e) {
      py::set_error(domain_error, e.what());
    }
  });

  // -- classical --------------------------------------------------------------
  m.def(
      "canonical_point",
      [](const MatrixXd& features, const VectorXd& xi, std::optional<VectorXd> base) {
        py::dict d = point_dict(CanonicalPoint(family(features, base), xi));
        d["covariance"] = covariance(CanonicalPoint(family(features, base), xi));
        return d;
      },
      py::arg("features"), py::arg("xi"), py::arg("base") = py::none(),
      "Probabilities, means, Massieu value, entropy and covariance at canonical coordinates xi.\n"
      "features is |Omega| x n.");

  m.def(
      "fit_classical",
      [](const MatrixXd& features, const VectorXd& means, std::optional<VectorXd> base, double tol) {
        MaxentOptions opts;
        opts.tol = tol;
        const auto res = maxent_fit_detailed(family(features, base), means, opts);
        py::dict d = point_dict(res.point);
        d["iterations"] = res.iterations;
        d["residual"] = res.residual;
        return d;
      },
      py::arg("features"), py::arg("means"), py::arg("base") = py::none(), py::arg("tol") = 1e-10,
      "Max-entropy member of the family with the given feature means.");

  m.def(
      "cramer_rao",
      [](const MatrixXd& features, const VectorXd& eta, std::optional<MatrixXd> estimator) {
        const auto fam = family(features, std::nullopt);
        const auto rep = cramer_rao_report(ParametricFamily::exponential_mixture(fam), eta,
                                           {estimator ? *estimator : features});
        py::dict d;
        d["V"] = rep.V;
        d["G"] = rep.G;
        d["gap"] = rep.gap;
        d["min_gap_eig"] = rep.min_gap_eig;
        d["efficiency"] = rep.efficiency ? py::cast(*rep.efficiency) : py::none();
        return d;
      },
      py::arg("features"), py::arg("eta"), py::arg("estimator") = py::none(),
      "Cramer-Rao report in mixture coordinates; the estimator defaults to the features.");

  m.def(
      "fisher_metric",
      [](const VectorXd& probs, const VectorXd& x, const VectorXd& y, const std::string& rep) {
        if (rep != "mixture" && rep != "exponential") throw InputError("rep must be mixture or exponential");
        const auto r = rep == "mixture" ? TangentRep::mixture : TangentRep::exponential;
        return fisher_metric(FiniteDistribution(probs), {r, x}, {r, y});
      },
      py::arg("probs"), py::arg("x"), py::arg("y"), py::arg("rep") = "mixture");

  m.def(
      "geodesic",
      [](const MatrixXd& features, const VectorXd& xi, const VectorXd& velocity, double alpha, double t_max,
         double dt) {
        const auto path = geodesic(CanonicalPoint(family(features, std::nullopt), xi), velocity, alpha, t_max, dt);
        MatrixXd xs(path.points.size(), xi.size());
        for (std::size_t k = 0; k < path.points.size(); ++k) xs.row(k) = path.points[k].xi().transpose();
        py::dict d;
        d["t"] = path.t;
        d["xi"] = xs;
        d["truncated"] = path.truncated;
        return d;
      },
      py::arg("features"), py::arg("xi"), py::arg("velocity"), py::arg("alpha"), py::arg("t_max"),
      py::arg("dt") = 1e-3);

  // -- quantum ----------------------------------------------------------------
  m.def(
      "quantum_fisher_info",
      [](const MatrixXcd& rho, const MatrixXcd& drho, const std::string& which) {
        return quantum_fisher_info(density(rho), HermitianMatrix(drho), parse_info(which));
      },
      py::arg("rho"), py::arg("drho"), py::arg("which") = "gns_sld", "which: gns_sld, bkm or right");

  m.def(
      "bkm_metric",
      [](const MatrixXcd& rho, const MatrixXcd& x, const MatrixXcd& y) {
        const auto r = density(rho);
        return bkm_metric(r, make_score(r, HermitianMatrix(x)), make_score(r, HermitianMatrix(y)));
      },
      py::arg("rho"), py::arg("x"), py::arg("y"), "BKM metric of the centred observables x and y.");

  m.def(
      "gns_metric",
      [](const MatrixXcd& rho, const MatrixXcd& x, const MatrixXcd& y) {
        const auto r = density(rho);
        return gns_metric(r, make_score(r, HermitianMatrix(x)), make_score(r, HermitianMatrix(y)));
      },
      py::arg("rho"), py::arg("x"), py::arg("y"));

  m.def(
      "log_derivatives",
      [](const MatrixXcd& rho, const MatrixXcd& drho) {
        const auto l = log_derivatives(density(rho), HermitianMatrix(drho));
        py::dict d;
        d["right"] = l.right;
        d["right_is_hermitian"] = l.right_is_hermitian;
        d["symmetric"] = l.symmetric.mat();
        d["bkm"] = l.bkm.mat();
        return d;
      },
      py::arg("rho"), py::arg("drho"));

  m.def(
      "fit_quantum",
      [](const MatrixXcd& h0, const std::vector<MatrixXcd>& features, const VectorXd& means) {
        std::vector<HermitianMatrix> f;
        for (const auto& x : features) f.emplace_back(x);
        const auto res = quantum_maxent_fit(QuantumExponentialFamily(HermitianMatrix(h0), f), means);
        py::dict d;
        d["xi"] = res.xi;
        d["rho"] = res.state.mat();
        d["log_z"] = res.log_z;
        d["entropy"] = quantum_entropy(res.state);
        d["iterations"] = res.iterations;
        return d;
      },
      py::arg("h0"), py::arg("features"), py::arg("means"));

  m.def(
      "mixture_entropy_bound",
      [](const MatrixXcd& rho, const MatrixXcd& sigma, double lambda) {
        const auto rep = mixture_entropy_bound(DensityMatrix(HermitianMatrix(rho), Boundary::allow),
                                               DensityMatrix(HermitianMatrix(sigma), Boundary::allow), lambda);
        py::dict d;
        d["lhs"] = rep.lhs;
        d["rhs"] = rep.rhs;
        d["slack"] = rep.slack;
        return d;
      },
      py::arg("rho"), py::arg("sigma"), py::arg("lam"));

  m.def(
      "audit_sweep",
      [](const std::string& metric, int dim, int trials, std::uint64_t seed) {
        const auto rep = audit_sweep(parse_audit_metric(metric), dim, trials, seed);
        py::dict d;
        d["trials"] = rep.trials;
        d["skipped"] = rep.skipped;
        d["worst_violation"] = rep.worst_violation;
        d["ratios"] = rep.ratios;
        return d;
      },
      py::arg("metric") = "bkm", py::arg("dim") = 3, py::arg("trials") = 1000, py::arg("seed") = 0);

  m.def(
      "expand_log_z",
      [](const MatrixXcd& h0, const MatrixXcd& v, int max_order) {
        const auto rep = expand_log_z({HermitianMatrix(h0), HermitianMatrix(v), max_order});
        py::dict d;
        d["exact"] = rep.exact_log_z;
        d["terms"] = rep.terms;
        d["partial_sums"] = rep.partial_sums;
        d["truncation_errors"] = rep.truncation_errors;
        d["diverged"] = rep.diverged;
        return d;
      },
      py::arg("h0"), py::arg("v"), py::arg("max_order") = 4);

  m.def(
      "roll",
      [](const VectorXd& initial, const MatrixXd& generator, const MatrixXd& features, double dt, int steps) {
        const auto run = roll(FiniteDistribution(initial), MarkovGenerator(generator),
                              family(features, std::nullopt), dt, steps);
        const auto rows = static_cast<Eigen::Index>(run.trajectory.size());
        MatrixXd eta(rows, features.cols());
        VectorXd t(rows), s(rows), pre(rows), defect(rows);
        for (Eigen::Index k = 0; k < rows; ++k) {
          const auto& rec = run.trajectory[static_cast<std::size_t>(k)];
          t(k) = rec.t;
          eta.row(k) = rec.eta.transpose();
          s(k) = rec.entropy;
          pre(k) = rec.pre_entropy;
          defect(k) = rec.projection_defect;
        }
        py::dict d;
        d["t"] = t;
        d["eta"] = eta;
        d["entropy"] = s;
        d["pre_entropy"] = pre;
        d["projection_defect"] = defect;
        d["truncated"] = run.truncated;
        return d;
      },
      py::arg("initial"), py::arg("generator"), py::arg("features"), py::arg("dt"), py::arg("steps"),
      "Rolling max-entropy projection of a master equation; generator columns sum to zero.");
}
