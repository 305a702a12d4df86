#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fraglm/covariance.hpp"
#include "fraglm/grid.hpp"
#include "fraglm/options.hpp"
#include "fraglm/regression.hpp"

namespace fraglm {

// Measurement-error variance estimate together with the two diagonal curves
// it is built from: V_X (1-D smoother through raw diagonal products) and the
// off-diagonal surface restricted to s = t.
struct NoiseModel {
  double sigma2 = 0.0;
  Eigen::VectorXd diag_estimate;
  Eigen::VectorXd offdiag_diagonal;
};

Eigen::VectorXd local_linear_mean(const FunctionalDataset& dataset, const KernelSpec& kernel,
                                  double h_mu);

struct CovSmootherResult {
  CovarianceSurface surface;
  Eigen::VectorXd raw_diagonal;  // V_X: 1-D smoother through the diagonal points
};

// 2-D local linear smoother of the raw covariances (diagonal raw points
// excluded), evaluated on grid x grid exploiting symmetry. The diagonal
// smoother V_X uses bandwidth h_diag.
CovSmootherResult local_linear_cov(const FunctionalDataset& dataset, const Eigen::VectorXd& mean,
                                   const KernelSpec& kernel, double h_c, double h_diag);

NoiseModel estimate_sigma2(const Eigen::VectorXd& v_x, const CovarianceSurface& surface,
                           const FunctionalDataset& dataset);

// Conditional-expectation scores lambda_j phi_ij^T Sigma_Z^{-1} (Z_i - mu_i)
// with Sigma_Z = c(t_iu, t_iv) + sigma2 I at the observed points; the c used
// is either the fitted (retained-component) surface or the raw smoothed one.
ScoreMatrix pace_scores(const FunctionalDataset& dataset, const CovarianceSurface& surface,
                        const EigenSystem& system, Eigen::Index m,
                        PaceSigma mode = PaceSigma::fitted);

// Everything the smoothing stage produces, shared between the WME and IN
// estimators so both consume identical objects.
struct SmoothedMoments {
  Eigen::VectorXd mean;
  CovarianceSurface cov;
  NoiseModel noise;
  EigenSystem system;  // mean and noise_variance filled
  double h_mu = 0.0;
  double h_c = 0.0;
};

SmoothedMoments smooth_moments(const FunctionalDataset& dataset, const FitOptions& options);

struct WmeFit {
  SlopeEstimate slope;
  EigenSystem system;
  NoiseModel noise;
  ScoreMatrix scores;
  double h_mu = 0.0;
  double h_c = 0.0;
  std::vector<std::string> warnings;
};

WmeFit fit_wme(const FunctionalDataset& dataset, const FitOptions& options);
WmeFit fit_wme(const FunctionalDataset& dataset, const FitOptions& options,
               const SmoothedMoments& moments);

}  // namespace fraglm
