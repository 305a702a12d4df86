#include "fraglm/wme.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fraglm/local_linear.hpp"

namespace fraglm {

namespace {

std::size_t total_observations(const FunctionalDataset& dataset) {
  std::size_t total = 0;
  for (const auto& c : dataset.curves) total += static_cast<std::size_t>(c.mask.count());
  return total;
}

}  // namespace

Eigen::VectorXd local_linear_mean(const FunctionalDataset& dataset, const KernelSpec& kernel,
                                  double h_mu) {
  dataset.validate();
  std::vector<double> xs, ys;
  xs.reserve(total_observations(dataset));
  ys.reserve(xs.capacity());
  for (const auto& c : dataset.curves) {
    for (Eigen::Index k = 0; k < dataset.grid.size(); ++k) {
      if (c.mask[k]) {
        xs.push_back(dataset.grid.points[k]);
        ys.push_back(c.values[k]);
      }
    }
  }
  const BinnedPoints1D pts = bin_points(std::move(xs), std::move(ys));
  Eigen::VectorXd mu(dataset.grid.size());
  for (Eigen::Index k = 0; k < dataset.grid.size(); ++k)
    mu[k] = local_linear_eval(pts, kernel, h_mu, dataset.grid.points[k]);
  return mu;
}

CovSmootherResult local_linear_cov(const FunctionalDataset& dataset, const Eigen::VectorXd& mean,
                                   const KernelSpec& kernel, double h_c, double h_diag) {
  dataset.validate();
  if (mean.size() != dataset.grid.size())
    raise(errc::invalid_argument, "local_linear_cov: mean length mismatch");

  std::vector<double> x1, x2, g, dx, dg;
  for (const auto& c : dataset.curves) {
    std::vector<Eigen::Index> obs;
    for (Eigen::Index k = 0; k < dataset.grid.size(); ++k)
      if (c.mask[k]) obs.push_back(k);
    for (auto l : obs) {
      const double rl = c.values[l] - mean[l];
      dx.push_back(dataset.grid.points[l]);
      dg.push_back(rl * rl);
      for (auto k : obs) {
        if (k == l) continue;  // raw diagonal points stay out of the surface fit
        x1.push_back(dataset.grid.points[l]);
        x2.push_back(dataset.grid.points[k]);
        g.push_back(rl * (c.values[k] - mean[k]));
      }
    }
  }

  const BinnedPoints2D cells = bin_points(std::move(x1), std::move(x2), std::move(g));
  const Eigen::Index p = dataset.grid.size();
  Eigen::MatrixXd surf(p, p);
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = a; b < p; ++b) {
      const double v =
          local_linear_eval(cells, kernel, h_c, dataset.grid.points[b], dataset.grid.points[a]);
      surf(a, b) = v;
      surf(b, a) = v;
    }
  }

  const BinnedPoints1D diag = bin_points(std::move(dx), std::move(dg));
  Eigen::VectorXd v_x(p);
  for (Eigen::Index k = 0; k < p; ++k)
    v_x[k] = local_linear_eval(diag, kernel, h_diag, dataset.grid.points[k]);

  return CovSmootherResult{CovarianceSurface(dataset.grid, std::move(surf)), std::move(v_x)};
}

NoiseModel estimate_sigma2(const Eigen::VectorXd& v_x, const CovarianceSurface& surface,
                           const FunctionalDataset& dataset) {
  const GridDomain& grid = dataset.grid;
  if (v_x.size() != grid.size()) raise(errc::invalid_argument, "estimate_sigma2: V_X length mismatch");

  // T1 = [inf L_i + |T|/4, sup R_i - |T|/4] from the observed fragment ends.
  double inf_l = grid.t_max, sup_r = grid.t_min;
  for (const auto& c : dataset.curves) {
    const auto rs = c.mask.runs();
    inf_l = std::min(inf_l, grid.points[rs.front().first]);
    sup_r = std::max(sup_r, grid.points[rs.back().second]);
  }
  const double trim = grid.length() / 4.0;
  const double lo = inf_l + trim, hi = sup_r - trim;
  if (!(lo < hi))
    raise(errc::configuration,
          "estimate_sigma2: central interval T1 is empty; fragments cover too little of the "
          "domain for the |T|/4 trim");

  std::vector<std::uint8_t> in_range(static_cast<std::size_t>(grid.size()), 0);
  for (Eigen::Index k = 0; k < grid.size(); ++k)
    in_range[static_cast<std::size_t>(k)] = (grid.points[k] >= lo && grid.points[k] <= hi) ? 1 : 0;
  const ObservationMask t1_mask{in_range};

  NoiseModel noise;
  noise.diag_estimate = v_x;
  noise.offdiag_diagonal = surface.values().diagonal();
  const Eigen::VectorXd diff = v_x - noise.offdiag_diagonal;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.size());
  const double integral = masked_inner_product(diff, ones, t1_mask, grid);
  noise.sigma2 = std::max(0.0, 2.0 * integral / grid.length());
  return noise;
}

ScoreMatrix pace_scores(const FunctionalDataset& dataset, const CovarianceSurface& surface,
                        const EigenSystem& system, Eigen::Index m, PaceSigma mode) {
  dataset.validate();
  if (m < 1 || m > system.count()) raise(errc::invalid_argument, "pace_scores: m out of range");
  const double sigma2 = system.noise_variance;

  ScoreMatrix out;
  out.entries.resize(dataset.n(), m);
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    const auto& curve = dataset.curves[i];
    std::vector<Eigen::Index> obs;
    for (Eigen::Index k = 0; k < dataset.grid.size(); ++k)
      if (curve.mask[k]) obs.push_back(k);
    const auto no = static_cast<Eigen::Index>(obs.size());

    Eigen::MatrixXd sigma(no, no);
    Eigen::VectorXd resid(no);
    if (mode == PaceSigma::fitted) {
      Eigen::MatrixXd phi_obs(no, system.count());
      for (Eigen::Index a = 0; a < no; ++a)
        phi_obs.row(a) = system.eigenfunctions.row(obs[a]);
      Eigen::VectorXd lambdas(system.count());
      for (Eigen::Index j = 0; j < system.count(); ++j)
        lambdas[j] = system.eigenvalues[static_cast<std::size_t>(j)];
      sigma = phi_obs * lambdas.asDiagonal() * phi_obs.transpose();
    }
    for (Eigen::Index a = 0; a < no; ++a) {
      resid[a] = curve.values[obs[a]] - system.mean[obs[a]];
      if (mode == PaceSigma::raw)
        for (Eigen::Index b = 0; b < no; ++b) sigma(a, b) = surface.values()(obs[a], obs[b]);
      sigma(a, a) += sigma2;
    }
    if (sigma2 == 0.0) {
      // Eq. 12 presumes invertibility supplied by sigma2 > 0; stabilize.
      sigma.diagonal().array() += 1e-10 * sigma.trace();
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma);
    Eigen::VectorXd x = ldlt.solve(resid);
    if (ldlt.info() != Eigen::Success || !x.allFinite())
      raise(errc::numeric, "pace_scores: singular observation covariance for curve " +
                               std::to_string(i));
    for (Eigen::Index j = 0; j < m; ++j) {
      double dot = 0.0;
      for (Eigen::Index a = 0; a < no; ++a) dot += system.eigenfunctions(obs[a], j) * x[a];
      out.entries(i, j) = system.eigenvalues[static_cast<std::size_t>(j)] * dot;
    }
  }
  return out;
}

SmoothedMoments smooth_moments(const FunctionalDataset& dataset, const FitOptions& options) {
  const std::size_t total = total_observations(dataset);
  const double h_mu = options.bandwidths.mean_bandwidth(dataset.grid.length(), total);
  const double h_c = options.bandwidths.cov_bandwidth(dataset.grid.length(), total);

  Eigen::VectorXd mean = local_linear_mean(dataset, options.kernel, h_mu);
  CovSmootherResult cov = local_linear_cov(dataset, mean, options.kernel, h_c, h_mu);
  NoiseModel noise = estimate_sigma2(cov.raw_diagonal, cov.surface, dataset);

  EigenSystem system = eigendecompose(cov.surface, dataset.grid.size());
  system.mean = mean;
  system.noise_variance = noise.sigma2;

  return SmoothedMoments{std::move(mean), std::move(cov.surface), std::move(noise),
                         std::move(system), h_mu, h_c};
}

WmeFit fit_wme(const FunctionalDataset& dataset, const FitOptions& options) {
  SmoothedMoments moments = [&] {
    try {
      return smooth_moments(dataset, options);
    } catch (const error& e) {
      rethrow_staged(e, "fit_wme[smooth_moments]");
    }
  }();
  return fit_wme(dataset, options, moments);
}

WmeFit fit_wme(const FunctionalDataset& dataset, const FitOptions& options,
               const SmoothedMoments& moments) {
  WmeFit fit;
  fit.system = moments.system;
  fit.noise = moments.noise;
  fit.h_mu = moments.h_mu;
  fit.h_c = moments.h_c;

  Eigen::Index m = 0;
  try {
    m = select_m_fve(fit.system.eigenvalues, options.fve_threshold);
  } catch (const error& e) {
    rethrow_staged(e, "fit_wme[select_m_fve]");
  }
  try {
    fit.scores = pace_scores(dataset, moments.cov, fit.system, m, options.pace_sigma);
  } catch (const error& e) {
    rethrow_staged(e, "fit_wme[pace_scores]");
  }
  try {
    fit.slope = fit_slope(fit.scores, dataset.responses, fit.system, m);
  } catch (const error& e) {
    rethrow_staged(e, "fit_wme[fit_slope]");
  }
  return fit;
}

}  // namespace fraglm
