#include "fraglm/local_linear.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace fraglm {

BinnedPoints1D bin_points(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size()) raise(errc::invalid_argument, "bin_points: length mismatch");
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  BinnedPoints1D out;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const double xi = x[order[r]];
    if (!out.x.empty() && out.x.back() == xi) {
      out.count.back() += 1.0;
      out.sum.back() += y[order[r]];
    } else {
      out.x.push_back(xi);
      out.count.push_back(1.0);
      out.sum.push_back(y[order[r]]);
    }
  }
  return out;
}

BinnedPoints2D bin_points(std::vector<double> x1, std::vector<double> x2, std::vector<double> y) {
  if (x1.size() != x2.size() || x1.size() != y.size())
    raise(errc::invalid_argument, "bin_points: length mismatch");
  std::vector<std::size_t> order(x1.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x1[a] != x1[b] ? x1[a] < x1[b] : x2[a] < x2[b];
  });

  BinnedPoints2D out;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const double a = x1[order[r]], b = x2[order[r]];
    if (!out.x1.empty() && out.x1.back() == a && out.x2.back() == b) {
      out.count.back() += 1.0;
      out.sum.back() += y[order[r]];
    } else {
      out.x1.push_back(a);
      out.x2.push_back(b);
      out.count.push_back(1.0);
      out.sum.push_back(y[order[r]]);
    }
  }
  return out;
}

double local_linear_eval(const BinnedPoints1D& pts, const KernelSpec& kernel, double h, double t,
                         double widen_limit) {
  if (h <= 0) raise(errc::invalid_argument, "local_linear_eval: bandwidth must be positive");
  for (double hh = h; hh <= widen_limit * h * (1 + 1e-12); hh *= 2.0) {
    double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
    double xmin = 0, xmax = 0;
    bool seen = false;
    for (std::size_t r = 0; r < pts.x.size(); ++r) {
      const double d = pts.x[r] - t;
      const double k = kernel(d / hh);
      if (k <= 0) continue;
      const double w = k * pts.count[r];
      const double ybar = pts.sum[r] / pts.count[r];
      s0 += w;
      s1 += w * d;
      s2 += w * d * d;
      t0 += w * ybar;
      t1 += w * ybar * d;
      if (!seen) {
        xmin = xmax = pts.x[r];
        seen = true;
      } else {
        xmin = std::min(xmin, pts.x[r]);
        xmax = std::max(xmax, pts.x[r]);
      }
    }
    if (!seen || xmin == xmax) continue;
    const double det = s0 * s2 - s1 * s1;
    if (det <= 1e-12 * s0 * s2) continue;
    return (s2 * t0 - s1 * t1) / det;
  }
  raise(errc::numeric, "local_linear_eval: degenerate window at t=" + std::to_string(t));
}

double local_linear_eval(const BinnedPoints2D& pts, const KernelSpec& kernel, double h, double t1,
                         double t2, double widen_limit) {
  if (h <= 0) raise(errc::invalid_argument, "local_linear_eval: bandwidth must be positive");
  for (double hh = h; hh <= widen_limit * h * (1 + 1e-12); hh *= 2.0) {
    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    int cells = 0;
    for (std::size_t r = 0; r < pts.x1.size(); ++r) {
      const double d1 = pts.x1[r] - t1;
      const double d2 = pts.x2[r] - t2;
      const double k = kernel(d1 / hh) * kernel(d2 / hh);
      if (k <= 0) continue;
      const double w = k * pts.count[r];
      const double ybar = pts.sum[r] / pts.count[r];
      a(0, 0) += w;
      a(0, 1) += w * d1;
      a(0, 2) += w * d2;
      a(1, 1) += w * d1 * d1;
      a(1, 2) += w * d1 * d2;
      a(2, 2) += w * d2 * d2;
      b[0] += w * ybar;
      b[1] += w * ybar * d1;
      b[2] += w * ybar * d2;
      ++cells;
    }
    if (cells < 3) continue;
    a(1, 0) = a(0, 1);
    a(2, 0) = a(0, 2);
    a(2, 1) = a(1, 2);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(a);
    if (es.eigenvalues()[0] <= 1e-12 * es.eigenvalues()[2]) continue;
    const Eigen::Vector3d beta = es.eigenvectors() *
                                 (es.eigenvectors().transpose() * b).cwiseQuotient(es.eigenvalues());
    return beta[0];
  }
  raise(errc::numeric, "local_linear_eval: degenerate window at (" + std::to_string(t1) + "," +
                           std::to_string(t2) + ")");
}

}  // namespace fraglm
