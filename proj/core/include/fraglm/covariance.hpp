#pragma once

#include <Eigen/Core>
#include <vector>

#include "fraglm/grid.hpp"

namespace fraglm {

// Discretized covariance function c(t_u, t_v) on grid x grid, symmetrized on
// construction.
class CovarianceSurface {
 public:
  CovarianceSurface(GridDomain grid, Eigen::MatrixXd values);

  const GridDomain& grid() const { return grid_; }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  GridDomain grid_;
  Eigen::MatrixXd values_;
};

// Estimated eigenstructure of a covariance operator: descending positive
// eigenvalues, quadrature-orthonormal eigenfunctions (one per column), the
// mean function and measurement-noise variance (both filled by the caller).
struct EigenSystem {
  GridDomain grid;
  Eigen::VectorXd mean;
  std::vector<double> eigenvalues;
  Eigen::MatrixXd eigenfunctions;  // p x K
  double noise_variance = 0.0;

  Eigen::Index count() const { return static_cast<Eigen::Index>(eigenvalues.size()); }
};

// Solves the discretized integral-operator eigenproblem via the symmetric
// form W^{1/2} C W^{1/2}. Keeps eigenpairs with lambda > max(0, 1e-10 * l1),
// renormalizes to unit quadrature norm and applies the sign convention
// (nonnegative integral, falling back to a nonnegative first value).
EigenSystem eigendecompose(const CovarianceSurface& surface, Eigen::Index max_components);

// Smallest k whose cumulative eigenvalue share reaches the threshold.
Eigen::Index select_m_fve(const std::vector<double>& eigenvalues, double threshold);

}  // namespace fraglm
