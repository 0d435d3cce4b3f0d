#include "infogeo/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "infogeo/errors.hpp"
#include "infogeo/io.hpp"

namespace infogeo::cli {

namespace {

using io::json;

struct Output {
  std::string path;
  std::ostream* fallback = nullptr;

  void write(const std::function<void(std::ostream&)>& body) const {
    if (path.empty()) {
      body(*fallback);
      return;
    }
    std::ofstream f(path);
    if (!f) throw InputError("cannot write '" + path + "'");
    body(f);
  }
  void emit(const json& j) const {
    write([&](std::ostream& os) { os << j.dump(2) << '\n'; });
  }
};

/// Records options the user set explicitly.
json overrides(const std::vector<const CLI::Option*>& opts) {
  json o = json::object();
  for (const auto* opt : opts) {
    if (opt->count() == 0) continue;
    std::string name = opt->get_name(false, true);
    name.erase(0, name.find_first_not_of('-'));
    o[name] = opt->as<std::string>();
  }
  return o;
}

json metadata(const std::string& cmd, const json& over, const json& extra = json::object()) {
  json m = extra;
  m["subcommand"] = cmd;
  m["overrides"] = over;
  return m;
}

VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Fit tolerances shared by the max-entropy subcommands.
struct FitFlags {
  double tol = 1e-10;
  int max_iter = 200;
  double radius = 1e3;
  std::vector<const CLI::Option*> opts;

  void add(CLI::App* sc) {
    opts.push_back(sc->add_option("--tol", tol, "residual tolerance on the means")
                       ->capture_default_str());
    opts.push_back(
        sc->add_option("--max-iter", max_iter, "Newton iteration limit")->capture_default_str());
    opts.push_back(sc->add_option("--divergence-radius", radius,
                                  "|xi| beyond which the target is declared infeasible")
                       ->capture_default_str());
  }
  MaxentOptions classical() const {
    MaxentOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    o.divergence_radius = radius;
    return o;
  }
  QuantumMaxentOptions quantum() const {
    QuantumMaxentOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    o.divergence_radius = radius;
    return o;
  }
};

CLI::Option* add_file(CLI::App* sc, const std::string& name, std::string& dest,
                      const std::string& help, bool required = true) {
  auto* opt = sc->add_option(name, dest, help)->check(CLI::ExistingFile);
  if (required) opt->required();
  return opt;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical information geometry on finite classical and quantum state spaces",
               "infogeo"};
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);
  std::string out_path;
  app.add_option("-o,--out", out_path, "write the report to this file instead of stdout");

  std::function<void(const Output&)> action;

  // -- fit-classical ---------------------------------------------------------
  std::string family_path;
  std::vector<double> means;
  FitFlags fit;
  {
    auto* sc = app.add_subcommand("fit-classical", "max-entropy fit of a classical family");
    add_file(sc, "--family", family_path, "family JSON");
    sc->add_option("--means", means, "target feature means")->required()->delimiter(',');
    fit.add(sc);
    sc->callback([&] {
      action = [&](const Output& o) {
        const auto model = io::classical_model_from_json(io::read_json_file(family_path));
        const MaxentResult r = maxent_fit_detailed(model.family, to_vector(means), fit.classical());
        o.emit({{"xi", io::to_json(r.point.xi())},
                {"eta", io::to_json(mixture_coords(r.point))},
                {"psi", r.point.psi()},
                {"entropy", entropy(r.point.to_distribution(Boundary::allow))},
                {"probs", io::to_json(r.point.probs())},
                {"iterations", r.iterations},
                {"residual", r.residual},
                {"metadata", metadata("fit-classical", overrides(fit.opts))}});
      };
    });
  }

  // -- fit-quantum -----------------------------------------------------------
  {
    auto* sc = app.add_subcommand("fit-quantum", "max-entropy fit of a quantum family");
    add_file(sc, "--family", family_path, "quantum family JSON");
    sc->add_option("--means", means, "target feature means")->required()->delimiter(',');
    fit.add(sc);
    sc->callback([&] {
      action = [&](const Output& o) {
        const auto fam = io::quantum_family_from_json(io::read_json_file(family_path));
        const QuantumMaxentResult r = quantum_maxent_fit(fam, to_vector(means), fit.quantum());
        o.emit({{"xi", io::to_json(r.xi)},
                {"eta", io::to_json(quantum_means(fam, r.state))},
                {"log_z", r.log_z},
                {"entropy", quantum_entropy(r.state)},
                {"state", io::matrix_to_json(r.state.mat())},
                {"iterations", r.iterations},
                {"residual", r.residual},
                {"metadata", metadata("fit-quantum", overrides(fit.opts))}});
      };
    });
  }

  // -- cramer-rao ------------------------------------------------------------
  std::vector<double> theta;
  std::string coords = "mixture";
  std::string estimator_path;
  {
    auto* sc = app.add_subcommand("cramer-rao", "classical Cramer-Rao matrix bound");
    add_file(sc, "--family", family_path, "family JSON");
    sc->add_option("--coords", coords, "parametrization of the family")
        ->check(CLI::IsMember({"mixture", "canonical"}))
        ->capture_default_str();
    sc->add_option("--theta", theta, "parameter point (default: the family's xi)")
        ->delimiter(',');
    add_file(sc, "--estimator", estimator_path,
             "JSON {\"functions\": [[...], ...]}, one estimator per row (default: the features)",
             false);
    sc->callback([&] {
      action = [&](const Output& o) {
        const auto model = io::classical_model_from_json(io::read_json_file(family_path));
        EstimatorSet est{model.family->features()};
        if (!estimator_path.empty()) {
          const json j = io::read_json_file(estimator_path);
          if (!j.contains("functions")) throw InputError("estimator: expected {\"functions\"}");
          est.functions = io::real_matrix_from_json(j.at("functions"), "functions").transpose();
          if (est.functions.rows() != model.family->omega_size()) {
            throw InputError("estimator: functions must have one value per outcome");
          }
        }
        const bool mixture = coords == "mixture";
        const ParametricFamily pf = mixture ? ParametricFamily::exponential_mixture(model.family)
                                            : ParametricFamily::exponential_canonical(model.family);
        VectorXd th;
        if (!theta.empty()) {
          th = to_vector(theta);
        } else {
          const CanonicalPoint pt(model.family,
                                  model.xi.value_or(VectorXd::Zero(model.family->dim())));
          th = mixture ? mixture_coords(pt) : pt.xi();
        }
        json j = io::to_json(cramer_rao_report(pf, th, est));
        j["theta"] = io::to_json(th);
        j["metadata"] = metadata("cramer-rao", json::object(), {{"coords", coords}});
        o.emit(j);
      };
    });
  }

  // -- quantum-cramer-rao ----------------------------------------------------
  std::string rho_path, sigma_path, drho_path, observable_path;
  {
    auto* sc = app.add_subcommand("quantum-cramer-rao",
                                  "GNS/SLD, BKM and right-derivative Cramer-Rao bounds");
    add_file(sc, "--rho", rho_path, "density matrix JSON");
    add_file(sc, "--drho", drho_path, "traceless derivative of the state, matrix JSON");
    add_file(sc, "--observable", observable_path, "estimator observable, matrix JSON");
    sc->callback([&] {
      action = [&](const Output& o) {
        const DensityMatrix rho = io::density_from_json(io::read_json_file(rho_path));
        const HermitianMatrix drho =
            io::hermitian_from_json(io::read_json_file(drho_path), "drho");
        const HermitianMatrix x =
            io::hermitian_from_json(io::read_json_file(observable_path), "observable");
        json j = io::to_json(quantum_cramer_rao(rho, drho, x));
        j["metadata"] = metadata("quantum-cramer-rao", json::object());
        o.emit(j);
      };
    });
  }

  // -- geodesic ----------------------------------------------------------------
  std::vector<double> velocity;
  double alpha = 0.0, t_max = 1.0, dt = 1e-3, box = 50.0;
  std::vector<const CLI::Option*> geo_opts;
  {
    auto* sc = app.add_subcommand("geodesic", "alpha-geodesic from the family's xi, as CSV");
    add_file(sc, "--family", family_path, "family JSON; xi is the start point");
    sc->add_option("--velocity", velocity, "initial velocity in canonical coordinates")
        ->required()
        ->delimiter(',');
    sc->add_option("--alpha", alpha, "connection parameter in [-1, 1]")->capture_default_str();
    sc->add_option("--t-max", t_max, "end time")->capture_default_str();
    geo_opts.push_back(sc->add_option("--dt", dt, "RK4 step")->capture_default_str());
    geo_opts.push_back(sc->add_option("--box", box, "|xi|_inf limit")->capture_default_str());
    sc->callback([&] {
      action = [&](const Output& o) {
        const auto model = io::classical_model_from_json(io::read_json_file(family_path));
        const CanonicalPoint start(model.family,
                                   model.xi.value_or(VectorXd::Zero(model.family->dim())));
        const GeodesicPath path = geodesic(start, to_vector(velocity), alpha, t_max, dt, {box});
        o.write([&](std::ostream& os) { io::write_geodesic_csv(path, os); });
        if (path.truncated) err << "warning: geodesic left the coordinate box and was truncated\n";
      };
    });
  }

  // -- transport ---------------------------------------------------------------
  std::vector<double> tangent;
  std::string rep = "exponential", connection = "plus";
  {
    auto* sc = app.add_subcommand("transport", "+1 / -1 parallel transport between two states");
    add_file(sc, "--rho", rho_path, "source distribution JSON");
    add_file(sc, "--sigma", sigma_path, "target distribution JSON");
    sc->add_option("--tangent", tangent, "tangent vector at rho")->required()->delimiter(',');
    sc->add_option("--rep", rep, "representation of the input tangent")
        ->check(CLI::IsMember({"exponential", "mixture"}))
        ->capture_default_str();
    sc->add_option("--connection", connection, "plus or minus")
        ->check(CLI::IsMember({"plus", "minus"}))
        ->capture_default_str();
    sc->callback([&] {
      action = [&](const Output& o) {
        const FiniteDistribution rho = io::distribution_from_json(io::read_json_file(rho_path));
        const FiniteDistribution sigma =
            io::distribution_from_json(io::read_json_file(sigma_path));
        const ClassicalTangent t{rep == "mixture" ? TangentRep::mixture : TangentRep::exponential,
                                 to_vector(tangent)};
        const ClassicalTangent moved = parallel_transport(
            rho, sigma, t, connection == "plus" ? Connection::plus : Connection::minus);
        o.emit({{"rep", moved.rep == TangentRep::mixture ? "mixture" : "exponential"},
                {"tangent", io::to_json(moved.vec)},
                {"metadata", metadata("transport", json::object(), {{"connection", connection}})}});
      };
    });
  }

  // -- audit-monotonicity ------------------------------------------------------
  std::string metric = "bkm";
  int dim = 3, trials = 1000;
  std::uint64_t seed = 0;
  {
    auto* sc = app.add_subcommand("audit-monotonicity",
                                  "contraction of information metrics under random maps");
    sc->add_option("--metric", metric, "fisher, gns or bkm")
        ->check(CLI::IsMember({"fisher", "gns", "bkm"}))
        ->capture_default_str();
    sc->add_option("--dim", dim, "input dimension")->check(CLI::Range(2, 64))->capture_default_str();
    sc->add_option("--trials", trials, "number of trials")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sc->add_option("--seed", seed, "master seed")->capture_default_str();
    sc->callback([&] {
      action = [&](const Output& o) {
        json j = io::to_json(audit_sweep(parse_audit_metric(metric), dim, trials, seed));
        j["metadata"] = metadata("audit-monotonicity", json::object(), {{"seed", seed}, {"dim", dim}});
        o.emit(j);
      };
    });
  }

  // -- kubo-expand -------------------------------------------------------------
  std::string h0_path, v_path, format = "json";
  int max_order = 4;
  {
    auto* sc = app.add_subcommand("kubo-expand", "Kubo-Mori expansion of log Z");
    add_file(sc, "--h0", h0_path, "unperturbed Hamiltonian, matrix JSON");
    add_file(sc, "--v", v_path, "perturbation, matrix JSON");
    sc->add_option("--max-order", max_order, "highest order, at most 6")
        ->check(CLI::Range(1, 6))
        ->capture_default_str();
    sc->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    sc->callback([&] {
      action = [&](const Output& o) {
        const PerturbationProblem prob{io::hermitian_from_json(io::read_json_file(h0_path), "H0"),
                                       io::hermitian_from_json(io::read_json_file(v_path), "V"),
                                       max_order};
        const SeriesReport r = expand_log_z(prob);
        if (format == "csv") {
          o.write([&](std::ostream& os) {
            os << "order,term,partial,error\n";
            for (std::size_t k = 0; k < r.terms.size(); ++k) {
              os << k << ',' << io::format_double(r.terms[k]) << ','
                 << io::format_double(r.partial_sums[k]) << ','
                 << io::format_double(r.truncation_errors[k]) << '\n';
            }
          });
          return;
        }
        const MassieuDerivativeResidual d = massieu_derivative_check(prob);
        json j = io::to_json(r);
        j["derivative_check"] = {{"first", d.first}, {"second", d.second}};
        j["metadata"] = metadata("kubo-expand", json::object(), {{"convention", SeriesReport::convention()}});
        o.emit(j);
      };
    });
  }

  // -- project-simulate --------------------------------------------------------
  std::string config_path, meta_path;
  std::optional<double> dt_override;
  std::optional<int> steps_override;
  {
    auto* sc = app.add_subcommand("project-simulate",
                                  "rolling max-entropy projection of a microdynamics, as CSV");
    add_file(sc, "--config", config_path, "run config JSON");
    sc->add_option("--dt", dt_override, "override the config step");
    sc->add_option("--steps", steps_override, "override the config step count");
    sc->add_option("--meta", meta_path, "write run metadata JSON to this file");
    sc->callback([&] {
      action = [&](const Output& o) {
        const json cfg = io::read_json_file(config_path);
        for (const char* key : {"generator", "family", "initial"}) {
          if (!cfg.contains(key)) throw InputError(std::string("config: missing \"") + key + "\"");
        }
        const double step = dt_override.value_or(cfg.value("dt", 0.0));
        const int steps = steps_override.value_or(cfg.value("steps", 0));
        const json& gen = cfg.at("generator");
        ProjectionRun run{};
        if (gen.is_array()) {
          const MarkovGenerator q(io::real_matrix_from_json(gen, "generator"));
          const auto model = io::classical_model_from_json(cfg.at("family"));
          const FiniteDistribution init =
              io::distribution_from_json(cfg.at("initial"), Boundary::allow);
          run = roll(init, q, model.family, step, steps);
        } else {
          const auto fam = io::quantum_family_from_json(cfg.at("family"));
          const DensityMatrix init = io::density_from_json(cfg.at("initial"), Boundary::allow);
          if (gen.contains("hamiltonian")) {
            run = roll(init, HamiltonianStep{io::hermitian_from_json(gen.at("hamiltonian"), "H")},
                       fam, step, steps);
          } else if (gen.contains("kraus")) {
            std::vector<MatrixXcd> kraus;
            for (const auto& k : gen.at("kraus")) kraus.push_back(io::matrix_from_json(k, "kraus"));
            run = roll(init, QuantumCPUnitalMap(std::move(kraus)), fam, step, steps);
          } else {
            throw InputError("config: generator must be a matrix, {\"hamiltonian\"} or {\"kraus\"}");
          }
        }
        o.write([&](std::ostream& os) { io::write_trajectory_csv(run, os); });
        if (run.truncated) err << "warning: run truncated: " << run.diagnostic << '\n';
        if (!meta_path.empty()) {
          json over = json::object();
          if (dt_override) over["dt"] = *dt_override;
          if (steps_override) over["steps"] = *steps_override;
          json m = metadata("project-simulate", over);
          m["projection"] = ProjectionRun::projection();
          m["dt"] = step;
          m["steps"] = steps;
          m["records"] = run.trajectory.size();
          m["truncated"] = run.truncated;
          m["diagnostic"] = run.diagnostic;
          Output{meta_path, nullptr}.emit(m);
        }
      };
    });
  }

  // -- entropy-bound -----------------------------------------------------------
  double lambda = 0.5;
  {
    auto* sc = app.add_subcommand("entropy-bound", "entropy of a mixture against its upper bound");
    add_file(sc, "--rho", rho_path, "density matrix JSON (boundary states allowed)");
    add_file(sc, "--sigma", sigma_path, "density matrix JSON (boundary states allowed)");
    sc->add_option("--lambda", lambda, "mixing weight in (0, 1)")->required();
    sc->callback([&] {
      action = [&](const Output& o) {
        const DensityMatrix rho = io::density_from_json(io::read_json_file(rho_path), Boundary::allow);
        const DensityMatrix sigma =
            io::density_from_json(io::read_json_file(sigma_path), Boundary::allow);
        json j = io::to_json(mixture_entropy_bound(rho, sigma, lambda));
        j["metadata"] = metadata("entropy-bound", json::object(), {{"lambda", lambda}});
        o.emit(j);
      };
    });
  }

  // -- sample ------------------------------------------------------------------
  std::int64_t count = 1000;
  {
    auto* sc = app.add_subcommand("sample", "draw a histogram and its empirical estimate");
    add_file(sc, "--rho", rho_path, "distribution JSON");
    sc->add_option("--count", count, "sample size")->check(CLI::PositiveNumber)->capture_default_str();
    sc->add_option("--seed", seed, "seed")->capture_default_str();
    add_file(sc, "--family", family_path, "also fit this family to the sample", false);
    sc->callback([&] {
      action = [&](const Output& o) {
        const FiniteDistribution rho = io::distribution_from_json(io::read_json_file(rho_path));
        std::optional<io::ClassicalModel> model;
        if (!family_path.empty()) {
          model = io::classical_model_from_json(io::read_json_file(family_path));
        }
        const Histogram hist = sample(rho, count, seed);
        const EmpiricalDistribution emp = empirical_distribution(hist);
        json j{{"histogram", hist},
               {"empirical", io::to_json(emp.dist.probs())},
               {"smoothing", emp.smoothing ? json(*emp.smoothing) : json(nullptr)},
               {"metadata", metadata("sample", json::object(), {{"seed", seed}, {"count", count}})}};
        if (model) j["fit_xi"] = io::to_json(estimate_from_data(model->family, hist).xi());
        o.emit(j);
      };
    });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    action(Output{out_path, &out});
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const io::json::exception& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace infogeo::cli
