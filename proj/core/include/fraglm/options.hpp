#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "fraglm/errors.hpp"

namespace fraglm {

// Symmetric probability-density kernels supported on [-1, 1].
enum class KernelFamily { epanechnikov, quartic, triangular };

struct KernelSpec {
  KernelFamily family = KernelFamily::epanechnikov;

  double operator()(double u) const {
    const double a = std::abs(u);
    if (a > 1.0) return 0.0;
    switch (family) {
      case KernelFamily::epanechnikov:
        return 0.75 * (1.0 - u * u);
      case KernelFamily::quartic:
        return 0.9375 * (1.0 - u * u) * (1.0 - u * u);
      case KernelFamily::triangular:
        return 1.0 - a;
    }
    return 0.0;
  }
};

enum class BandwidthMode { fixed, rule_of_thumb };

// Smoother bandwidths; rule-of-thumb scales with the pooled observation
// count as c * |T| * count^(-1/5).
struct Bandwidths {
  BandwidthMode mode = BandwidthMode::rule_of_thumb;
  double h_mu = 0.0;
  double h_c = 0.0;

  static constexpr double c_mu = 1.0;
  static constexpr double c_c = 0.5;

  double mean_bandwidth(double domain_length, std::size_t total_obs) const {
    if (mode == BandwidthMode::fixed) return h_mu;
    return c_mu * domain_length * std::pow(static_cast<double>(total_obs), -0.2);
  }
  double cov_bandwidth(double domain_length, std::size_t total_obs) const {
    if (mode == BandwidthMode::fixed) return h_c;
    return c_c * domain_length * std::pow(static_cast<double>(total_obs), -0.2);
  }
};

// Ridge parameter for missing-score completion: a fixed value or AUTO via
// GCV over rho_grid (empty grid = 8 log-spaced points in [1e-6*l1, l1]).
struct RidgeCompletionConfig {
  std::optional<double> rho;
  std::vector<double> rho_grid;
  int min_complete_for_gcv = 5;

  std::vector<double> effective_grid(double lambda1) const {
    if (!rho_grid.empty()) return rho_grid;
    std::vector<double> g(8);
    const double lo = std::log(1e-6 * lambda1), hi = std::log(lambda1);
    for (int k = 0; k < 8; ++k) g[k] = std::exp(lo + (hi - lo) * k / 7.0);
    return g;
  }
};

// Observation covariance used inside the conditional-expectation scores:
// the eigen-truncated fitted surface (sum of lambda_j phi_j phi_j^T over the
// retained components) or the raw smoothed surface. The raw surface carries
// cell-level estimation noise straight into the inverse, which produces
// heavy-tailed score failures on rough processes; fitted is the default.
enum class PaceSigma { fitted, raw };

struct FitOptions {
  double fve_threshold = 0.95;
  RidgeCompletionConfig ridge{};
  KernelSpec kernel{};
  Bandwidths bandwidths{};
  PaceSigma pace_sigma = PaceSigma::fitted;
  // IN baseline: rescale fragment quadrature scores by |T| / |O_i|.
  bool rescale_in_scores = true;
};

}  // namespace fraglm
