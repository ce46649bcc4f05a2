#pragma once

#include <string>

#include <json.hpp>

#include "bunchlab/distinguishability.hpp"
#include "bunchlab/errors.hpp"
#include "bunchlab/interferometry.hpp"
#include "bunchlab/types.hpp"

namespace bunchlab {

/// File formats. Matrices travel as JSON objects
///   {"rows": R, "cols": C, "data": [[re, im], ...]}
/// with row-major data and every entry a two-element [re, im] array, plus an
/// optional "metadata" object that is preserved on write and ignored on
/// read. Meshes use 1-based mode positions externally. All writes go
/// through a temp file in the target directory followed by a rename.
///
/// Filesystem failures raise IoError; structurally invalid content raises
/// ValidationError.

nlohmann::json matrix_to_json(const CMat& M);

CMat matrix_from_json(const nlohmann::json& j, const std::string& who);

void write_matrix(const std::string& path, const CMat& M,
                  const nlohmann::json& metadata = nlohmann::json());

CMat read_matrix(const std::string& path);

nlohmann::json mesh_to_json(const BeamsplitterMesh& mesh);

BeamsplitterMesh mesh_from_json(const nlohmann::json& j, const std::string& who);

void write_mesh(const std::string& path, const BeamsplitterMesh& mesh,
                const nlohmann::json& metadata = nlohmann::json());

BeamsplitterMesh read_mesh(const std::string& path);

/// Header epsilon,p_bunch,ratio,indistinguishability, one row per grid
/// point, and a final "#argmax_epsilon=<value>" comment line. 17
/// significant digits, '.' decimal point.
void write_scan_csv(const std::string& path, const ScanResult& scan);

void write_json_file(const std::string& path, const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);

/// Shortest round-trippable decimal form of x ("%.17g").
std::string format_double(double x);

}  // namespace bunchlab
