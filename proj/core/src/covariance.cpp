#include "fraglm/covariance.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace fraglm {

CovarianceSurface::CovarianceSurface(GridDomain grid, Eigen::MatrixXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.rows() != grid_.size() || values_.cols() != grid_.size())
    raise(errc::invalid_argument, "CovarianceSurface: values shape does not match grid");
  if (!values_.allFinite()) raise(errc::invalid_argument, "CovarianceSurface: non-finite entries");
  values_ = ((values_ + values_.transpose()) / 2.0).eval();
}

EigenSystem eigendecompose(const CovarianceSurface& surface, Eigen::Index max_components) {
  const GridDomain& grid = surface.grid();
  const Eigen::Index p = grid.size();
  if (max_components < 0 || max_components > p)
    raise(errc::invalid_argument, "eigendecompose: max_components out of range");

  const Eigen::VectorXd sqrt_w = grid.weights.cwiseSqrt();
  Eigen::MatrixXd sym = sqrt_w.asDiagonal() * surface.values() * sqrt_w.asDiagonal();
  sym = ((sym + sym.transpose()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) raise(errc::numeric, "eigendecompose: eigensolver failed");

  EigenSystem sys;
  sys.grid = grid;
  sys.mean = Eigen::VectorXd::Zero(p);
  sys.noise_variance = 0.0;

  const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
  const double lambda1 = evals[p - 1];
  const double cutoff = std::max(0.0, 1e-10 * lambda1);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = p - 1; k >= 0 && static_cast<Eigen::Index>(keep.size()) < max_components; --k) {
    if (evals[k] > cutoff) keep.push_back(k);
  }

  sys.eigenvalues.resize(keep.size());
  sys.eigenfunctions.resize(p, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    sys.eigenvalues[j] = evals[keep[j]];
    Eigen::VectorXd phi = solver.eigenvectors().col(keep[j]).cwiseQuotient(sqrt_w);
    const double norm2 = inner_product(phi, phi, grid);
    phi /= std::sqrt(norm2);
    double integral = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) integral += grid.weights[k] * phi[k];
    if (integral < -1e-10 || (std::abs(integral) <= 1e-10 && phi[0] < 0)) phi = -phi;
    sys.eigenfunctions.col(static_cast<Eigen::Index>(j)) = phi;
  }
  return sys;
}

Eigen::Index select_m_fve(const std::vector<double>& eigenvalues, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    raise(errc::invalid_argument, "select_m_fve: threshold must lie in (0,1)");
  double total = 0.0;
  for (double v : eigenvalues) total += v;
  if (eigenvalues.empty() || total <= 0.0)
    raise(errc::degenerate_spectrum, "select_m_fve: spectrum is all zero");
  double cum = 0.0;
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    cum += eigenvalues[k];
    if (cum / total >= threshold) return static_cast<Eigen::Index>(k + 1);
  }
  return static_cast<Eigen::Index>(eigenvalues.size());
}

}  // namespace fraglm
