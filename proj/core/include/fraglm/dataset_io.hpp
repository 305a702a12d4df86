#pragma once

#include <map>
#include <string>

#include "fraglm/covariance.hpp"
#include "fraglm/grid.hpp"
#include "fraglm/simulate.hpp"

namespace fraglm {

// Dataset CSV: header t_1,...,t_p,Y; one row per curve; unobserved points
// written as the literal NaN. Values round-trip bit-exactly.
void write_dataset_csv(const std::string& path, const FunctionalDataset& dataset);
FunctionalDataset read_dataset_csv(const std::string& path, const GridDomain& grid, bool noisy);

// Flat key-value sidecar ("key = value" per line, '#' comments).
std::map<std::string, std::string> read_kv_file(const std::string& path);
void write_meta(const std::string& path, const ScenarioConfig& config);
ScenarioConfig meta_to_config(const std::map<std::string, std::string>& kv);

void write_truth_csv(const std::string& path, const GridDomain& grid, const TruthBundle& truth);

// Eigensystem dump: columns t, mean, then one column per eigenfunction with
// the eigenvalue carried in the header as phi_j=<lambda_j>.
void write_eigen_csv(const std::string& path, const EigenSystem& system);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace fraglm
