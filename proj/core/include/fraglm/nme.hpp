#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fraglm/covariance.hpp"
#include "fraglm/grid.hpp"
#include "fraglm/options.hpp"
#include "fraglm/regression.hpp"

namespace fraglm {

// Pointwise mean and pairwise covariance estimated from curve fragments,
// with the per-point / per-pair contributor counts used for coverage checks.
struct PartialMoments {
  Eigen::VectorXd mean;
  CovarianceSurface cov;
  Eigen::VectorXi pointwise_counts;
  Eigen::MatrixXi pairwise_counts;
};

// Score decomposition per curve: fragment quadrature part, ridge-predicted
// missing part (zero for complete curves) and their sum.
struct CompletedScores {
  Eigen::MatrixXd observed_part;
  Eigen::MatrixXd missing_part;
  Eigen::MatrixXd total;
  std::vector<double> chosen_rho;
  Eigen::MatrixXd xi_norms;  // L2(O_i) norm of the completion functional per (i, j)
  bool gcv_fallback = false;
};

PartialMoments partial_moments(const FunctionalDataset& dataset);

CompletedScores complete_missing_scores(const FunctionalDataset& dataset,
                                        const PartialMoments& moments, const EigenSystem& system,
                                        Eigen::Index m, const RidgeCompletionConfig& config);

// GCV over the candidate grid: incomplete-curve mask patterns are
// transplanted (cycled) onto the complete curves, the masked-part scores are
// predicted via the ridge completion and scored against the truth computable
// from the complete curves. Sets *fallback when there is nothing to evaluate.
double select_rho_gcv(const FunctionalDataset& dataset, const PartialMoments& moments,
                      const EigenSystem& system, Eigen::Index m,
                      const RidgeCompletionConfig& config, bool* fallback);

struct NmeFit {
  SlopeEstimate slope;
  EigenSystem system;
  CompletedScores scores;
  double rho = 0.0;
  std::vector<std::string> warnings;
};

NmeFit fit_nme(const FunctionalDataset& dataset, const FitOptions& options);

// Rank-m curve prediction mean + sum_j score_j phi_j; does not interpolate
// the observed values.
Eigen::VectorXd reconstruct_curve(const ObservedCurve& curve, const EigenSystem& system,
                                  const Eigen::VectorXd& scores, Eigen::Index m);

}  // namespace fraglm
