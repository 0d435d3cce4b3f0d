#include "infogeo/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "infogeo/errors.hpp"

namespace infogeo::io {

namespace {

[[noreturn]] void bad(const char* what, const std::string& msg) {
  throw InputError(std::string(what) + ": " + msg);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) bad(what, "expected a number, got " + j.dump());
  return j.get<double>();
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

json to_json(const VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const MatrixXd& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(to_json(VectorXd(m.row(i).transpose())));
  return a;
}

json matrix_to_json(const MatrixXcd& m) {
  json j{{"dim", m.rows()}, {"re", to_json(MatrixXd(m.real()))}};
  if (m.imag().cwiseAbs().maxCoeff() > 0.0) j["im"] = to_json(MatrixXd(m.imag()));
  return j;
}

VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) bad(what, "expected an array of numbers");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], what);
  return v;
}

MatrixXd real_matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) bad(what, "expected a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) bad(what, "rows must be nonempty arrays");
  MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad(what, "ragged rows");
    m.row(static_cast<Eigen::Index>(r)) = vector_from_json(j[r], what).transpose();
  }
  return m;
}

MatrixXcd matrix_from_json(const json& j, const char* what) {
  if (j.is_array()) return real_matrix_from_json(j, what).cast<cplx>();
  if (!j.is_object() || !j.contains("re")) bad(what, "expected {\"dim\", \"re\", \"im\"}");
  const MatrixXd re = real_matrix_from_json(j.at("re"), what);
  MatrixXd im = MatrixXd::Zero(re.rows(), re.cols());
  if (j.contains("im")) im = real_matrix_from_json(j.at("im"), what);
  if (im.rows() != re.rows() || im.cols() != re.cols()) bad(what, "re and im shapes differ");
  if (j.contains("dim")) {
    if (!j.at("dim").is_number_integer() || j.at("dim").get<long>() != re.rows()) {
      bad(what, "\"dim\" does not match the matrix");
    }
  }
  MatrixXcd m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

HermitianMatrix hermitian_from_json(const json& j, const char* what) {
  return HermitianMatrix(matrix_from_json(j, what));
}

DensityMatrix density_from_json(const json& j, Boundary boundary) {
  HermitianMatrix h = hermitian_from_json(j, "density matrix");
  if (j.is_object() && j.contains("trace_tol")) {
    const double tol = number(j.at("trace_tol"), "trace_tol");
    const double tr = h.trace();
    if (std::abs(tr - 1.0) > tol) {
      throw InputError("density matrix trace " + format_double(tr) + " is outside trace_tol");
    }
    return DensityMatrix::normalized(h, boundary);
  }
  return DensityMatrix(h, boundary);
}

FiniteDistribution distribution_from_json(const json& j, Boundary boundary) {
  if (!j.is_object() || !j.contains("probs")) bad("distribution", "expected {\"probs\": [...]}");
  return FiniteDistribution(vector_from_json(j.at("probs"), "probs"), boundary);
}

json to_json(const FiniteDistribution& d) { return {{"probs", to_json(d.probs())}}; }

ClassicalModel classical_model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("features")) bad("family", "expected {\"features\": ...}");
  const MatrixXd rows = real_matrix_from_json(j.at("features"), "features");
  if (j.contains("omega")) {
    if (!j.at("omega").is_number_integer() || j.at("omega").get<long>() != rows.cols()) {
      bad("family", "\"omega\" does not match the feature length");
    }
  }
  std::optional<VectorXd> base;
  if (j.contains("base_log_density") && !j.at("base_log_density").is_null()) {
    base = vector_from_json(j.at("base_log_density"), "base_log_density");
  }
  ClassicalModel m{std::make_shared<const ExponentialFamily>(rows.transpose(), base), std::nullopt};
  if (j.contains("xi") && !j.at("xi").is_null()) {
    m.xi = vector_from_json(j.at("xi"), "xi");
    if (m.xi->size() != m.family->dim()) bad("family", "xi has the wrong dimension");
  }
  return m;
}

json to_json(const ExponentialFamily& fam, const std::optional<VectorXd>& xi) {
  json j{{"omega", fam.omega_size()},
         {"features", to_json(MatrixXd(fam.features().transpose()))},
         {"base_log_density", to_json(fam.base_log_density())}};
  if (xi) j["xi"] = to_json(*xi);
  return j;
}

QuantumExponentialFamily quantum_family_from_json(const json& j) {
  if (!j.is_object() || !j.contains("features")) {
    bad("quantum family", "expected {\"dim\", \"H0\", \"features\"}");
  }
  const json& fs = j.at("features");
  if (!fs.is_array() || fs.empty()) bad("quantum family", "features must be a nonempty array");
  std::vector<HermitianMatrix> features;
  for (const auto& f : fs) features.push_back(hermitian_from_json(f, "feature"));
  const int d = features.front().dim();
  HermitianMatrix h0 =
      j.contains("H0") ? hermitian_from_json(j.at("H0"), "H0") : HermitianMatrix::zero(d);
  if (j.contains("dim") && (!j.at("dim").is_number_integer() || j.at("dim").get<long>() != d)) {
    bad("quantum family", "\"dim\" does not match the matrices");
  }
  return QuantumExponentialFamily(std::move(h0), std::move(features));
}

json to_json(const CramerRaoReport& r) {
  return {{"V", to_json(r.V)},
          {"G", to_json(r.G)},
          {"gap_min_eig", r.min_gap_eig},
          {"efficiency", r.efficiency ? json(*r.efficiency) : json(nullptr)}};
}

json to_json(const QuantumCramerRaoReport& r) {
  json bounds = json::object();
  for (std::size_t k = 0; k < kAllQuantumInfos.size(); ++k) {
    bounds[to_string(kAllQuantumInfos[k])] = {
        {"info", r.info[k]}, {"bound", r.bound[k]}, {"slack", r.slack[k]}};
  }
  return {{"mean", r.mean},
          {"mean_derivative", r.mean_derivative},
          {"variance", r.variance},
          {"bkm_variance", r.bkm_variance},
          {"bounds", bounds}};
}

json to_json(const SeriesReport& r) {
  json terms = json::array(), partials = json::array(), errors = json::array();
  for (double x : r.terms) terms.push_back(x);
  for (double x : r.partial_sums) partials.push_back(x);
  for (double x : r.truncation_errors) errors.push_back(x);
  return {{"exact", r.exact_log_z},
          {"terms", terms},
          {"partials", partials},
          {"errors", errors},
          {"diverged", r.diverged}};
}

json to_json(const ContractionReport& r) {
  return {{"metric", to_string(r.metric)},
          {"trials", r.trials},
          {"skipped", r.skipped},
          {"worst_violation", r.worst_violation},
          {"ratios_histogram", r.histogram}};
}

json to_json(const MixtureEntropyReport& r) {
  return {{"lhs", r.lhs}, {"rhs", r.rhs}, {"slack", r.slack}};
}

void write_trajectory_csv(const ProjectionRun& run, std::ostream& os) {
  const auto n = run.trajectory.empty() ? 0 : run.trajectory.front().xi.size();
  os << "t";
  for (Eigen::Index j = 1; j <= n; ++j) os << ",xi_" << j;
  for (Eigen::Index j = 1; j <= n; ++j) os << ",eta_" << j;
  os << ",entropy,projection_defect\n";
  for (const auto& r : run.trajectory) {
    os << format_double(r.t);
    for (Eigen::Index j = 0; j < n; ++j) os << ',' << format_double(r.xi(j));
    for (Eigen::Index j = 0; j < n; ++j) os << ',' << format_double(r.eta(j));
    os << ',' << format_double(r.entropy) << ',' << format_double(r.projection_defect) << '\n';
  }
}

void write_geodesic_csv(const GeodesicPath& path, std::ostream& os) {
  const auto n = path.points.empty() ? 0 : path.points.front().xi().size();
  os << "t";
  for (Eigen::Index j = 1; j <= n; ++j) os << ",xi_" << j;
  for (Eigen::Index j = 1; j <= n; ++j) os << ",eta_" << j;
  os << ",psi,entropy\n";
  for (std::size_t k = 0; k < path.points.size(); ++k) {
    const CanonicalPoint& p = path.points[k];
    const VectorXd eta = mixture_coords(p);
    os << format_double(path.t[k]);
    for (Eigen::Index j = 0; j < n; ++j) os << ',' << format_double(p.xi()(j));
    for (Eigen::Index j = 0; j < n; ++j) os << ',' << format_double(eta(j));
    os << ',' << format_double(p.psi()) << ','
       << format_double(entropy(p.to_distribution(Boundary::allow))) << '\n';
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("cannot parse '" + path + "': " + e.what());
  }
}

}  // namespace infogeo::io
