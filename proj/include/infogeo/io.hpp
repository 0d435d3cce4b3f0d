#pragma once

#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "infogeo/classical_estimation.hpp"
#include "infogeo/kubo_mori.hpp"
#include "infogeo/monotonicity.hpp"
#include "infogeo/projection.hpp"
#include "infogeo/quantum_geometry.hpp"

namespace infogeo::io {

using json = nlohmann::json;

/// 17 significant digits, classic locale.
std::string format_double(double x);

json to_json(const VectorXd& v);
json to_json(const MatrixXd& m);
/// {"dim": n, "re": [[...]], "im": [[...]]}; "im" is omitted when zero.
json matrix_to_json(const MatrixXcd& m);

VectorXd vector_from_json(const json& j, const char* what);
MatrixXd real_matrix_from_json(const json& j, const char* what);
/// Accepts the {"dim", "re", "im"} object or a bare nested array of reals.
MatrixXcd matrix_from_json(const json& j, const char* what);
HermitianMatrix hermitian_from_json(const json& j, const char* what);
/// Matrix object with optional "trace_tol": a trace within trace_tol of one
/// is renormalized; without it the trace must be one to 1e-12.
DensityMatrix density_from_json(const json& j, Boundary boundary = Boundary::reject);

/// {"probs": [...]}
FiniteDistribution distribution_from_json(const json& j, Boundary boundary = Boundary::reject);
json to_json(const FiniteDistribution& d);

/// {"omega": n, "features": [[f_1(0..n-1)], [f_2(...)], ...],
///  "base_log_density": [...], "xi": [...]}; features are listed one per row.
struct ClassicalModel {
  std::shared_ptr<const ExponentialFamily> family;
  std::optional<VectorXd> xi;
};
ClassicalModel classical_model_from_json(const json& j);
json to_json(const ExponentialFamily& fam, const std::optional<VectorXd>& xi = std::nullopt);

/// {"dim": d, "H0": matrix, "features": [matrix, ...]}
QuantumExponentialFamily quantum_family_from_json(const json& j);

json to_json(const CramerRaoReport& r);
json to_json(const QuantumCramerRaoReport& r);
json to_json(const SeriesReport& r);
json to_json(const ContractionReport& r);
json to_json(const MixtureEntropyReport& r);

/// Header t, xi_1.., eta_1.., entropy, projection_defect.
void write_trajectory_csv(const ProjectionRun& run, std::ostream& os);
/// Header t, xi_1.., eta_1.., psi, entropy.
void write_geodesic_csv(const GeodesicPath& path, std::ostream& os);

json read_json_file(const std::string& path);

}  // namespace infogeo::io
