#pragma once

#include <Eigen/Core>
#include <vector>

#include "fraglm/options.hpp"

namespace fraglm {

// Scattered observations pooled for kernel smoothing. Points sharing a
// location are collapsed into one cell (count + value sum); with grid-located
// observations this turns the smoother cost from O(points) into O(cells) per
// evaluation while staying generic over arbitrary locations.
struct BinnedPoints1D {
  std::vector<double> x;
  std::vector<double> count;
  std::vector<double> sum;
};

struct BinnedPoints2D {
  std::vector<double> x1, x2;
  std::vector<double> count;
  std::vector<double> sum;
};

BinnedPoints1D bin_points(std::vector<double> x, std::vector<double> y);
BinnedPoints2D bin_points(std::vector<double> x1, std::vector<double> x2, std::vector<double> y);

// Weighted local linear fit evaluated at t. Degenerate windows are retried
// with the bandwidth doubled up to limit_factor times the input before
// failing.
double local_linear_eval(const BinnedPoints1D& pts, const KernelSpec& kernel, double h, double t,
                         double widen_limit = 4.0);

// Local plane fit evaluated at (t1, t2) for surface smoothing.
double local_linear_eval(const BinnedPoints2D& pts, const KernelSpec& kernel, double h, double t1,
                         double t2, double widen_limit = 4.0);

}  // namespace fraglm
