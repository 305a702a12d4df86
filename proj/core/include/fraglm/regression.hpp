#pragma once

#include <Eigen/Core>

#include "fraglm/covariance.hpp"
#include "fraglm/grid.hpp"

namespace fraglm {

struct ScoreMatrix {
  Eigen::MatrixXd entries;  // n x m

  Eigen::Index n() const { return entries.rows(); }
  Eigen::Index m() const { return entries.cols(); }
};

// Truncated slope estimate: coefficients on the first m eigenfunctions, the
// assembled gamma(t) on the grid, and the intercept.
struct SlopeEstimate {
  Eigen::Index m = 0;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd gamma;
  double intercept = 0.0;
};

// Quadrature scores <X_i - mean, phi_j> for fully observed curves.
ScoreMatrix complete_scores(const FunctionalDataset& dataset, const EigenSystem& system,
                            Eigen::Index m);

// Least squares of centered responses on the score columns; gamma assembled
// from the system's eigenfunctions, intercept = Ybar - <gamma, mean>.
SlopeEstimate fit_slope(const ScoreMatrix& scores, const Eigen::VectorXd& responses,
                        const EigenSystem& system, Eigen::Index m);

}  // namespace fraglm
