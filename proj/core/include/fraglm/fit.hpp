#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fraglm/nme.hpp"
#include "fraglm/options.hpp"
#include "fraglm/wme.hpp"

namespace fraglm {

enum class Method { ori, sub, nme, in, wme };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

// Uniform result shape across all five estimators; the optional fields carry
// whatever diagnostics the method produced.
struct FitResult {
  Method method = Method::ori;
  SlopeEstimate slope;
  EigenSystem system;
  ScoreMatrix scores;
  std::optional<NoiseModel> noise;
  std::optional<CompletedScores> completed;
  std::optional<double> rho;
  std::optional<double> h_mu, h_c;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

FitResult fit_ori(const FunctionalDataset& dataset, const FitOptions& options);
FitResult fit_sub(const FunctionalDataset& dataset, const FitOptions& options);
FitResult fit_in(const FunctionalDataset& dataset, const FitOptions& options);
FitResult fit_in(const FunctionalDataset& dataset, const FitOptions& options,
                 const SmoothedMoments& moments);

FitResult fit_method(Method method, const FunctionalDataset& dataset, const FitOptions& options);

}  // namespace fraglm
