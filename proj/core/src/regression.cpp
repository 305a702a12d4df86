#include "fraglm/regression.hpp"

#include <Eigen/Dense>
#include <sstream>

namespace fraglm {

ScoreMatrix complete_scores(const FunctionalDataset& dataset, const EigenSystem& system,
                            Eigen::Index m) {
  dataset.validate();
  if (m < 1 || m > system.count()) raise(errc::invalid_argument, "complete_scores: m out of range");
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    if (!dataset.curves[i].mask.is_full())
      raise(errc::incomplete_data,
            "complete_scores: curve " + std::to_string(i) + " is not fully observed");
  }

  ScoreMatrix scores;
  scores.entries.resize(dataset.n(), m);
  Eigen::VectorXd centered(dataset.grid.size());
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    centered = dataset.curves[i].values - system.mean;
    for (Eigen::Index j = 0; j < m; ++j)
      scores.entries(i, j) = inner_product(centered, system.eigenfunctions.col(j), dataset.grid);
  }
  return scores;
}

SlopeEstimate fit_slope(const ScoreMatrix& scores, const Eigen::VectorXd& responses,
                        const EigenSystem& system, Eigen::Index m) {
  const Eigen::Index n = scores.n();
  if (m < 1 || m > scores.m() || m > system.count())
    raise(errc::invalid_argument, "fit_slope: m out of range");
  if (responses.size() != n) raise(errc::invalid_argument, "fit_slope: responses length mismatch");
  if (n <= m) raise(errc::insufficient_data, "fit_slope: need n > m");

  const auto U = scores.entries.leftCols(m);
  const double ybar = responses.mean();
  const Eigen::VectorXd yc = responses.array() - ybar;

  const Eigen::MatrixXd gram = U.transpose() * U;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success) raise(errc::numeric, "fit_slope: Gram eigensolver failed");
  const double emin = es.eigenvalues()[0];
  const double emax = es.eigenvalues()[m - 1];
  const double cond = (emin > 0.0) ? emax / emin : std::numeric_limits<double>::infinity();
  if (!(cond < 1e12)) {
    std::ostringstream msg;
    msg << "fit_slope: score Gram matrix is rank deficient (condition number " << cond << ")";
    raise(errc::singular_design, msg.str());
  }

  SlopeEstimate est;
  est.m = m;
  est.coefficients = gram.ldlt().solve(U.transpose() * yc);
  est.gamma = system.eigenfunctions.leftCols(m) * est.coefficients;
  est.intercept = ybar - inner_product(est.gamma, system.mean, system.grid);
  return est;
}

}  // namespace fraglm
