#include "fraglm/nme.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace fraglm {

namespace {

std::vector<Eigen::Index> mask_indices(const ObservationMask& mask, bool flag) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index k = 0; k < mask.size(); ++k)
    if (mask[k] == flag) idx.push_back(k);
  return idx;
}

// Weighted-coordinate discretization of the restricted covariance operators
// for one observed/missing split. Solving (S + rho I) eta = b with
// S = W_O^{1/2} C_OO W_O^{1/2} is the symmetrized form of the continuum
// equation (C_OO + rho F) xi = C_OM phi_M; scores only ever need
// eta^T W_O^{1/2} x, so zero-weight points never divide by zero.
struct CompletionOperator {
  std::vector<Eigen::Index> obs, mis;
  Eigen::VectorXd sqrt_w_obs;      // per-run trapezoid weights on O, sqrt
  Eigen::MatrixXd sym;             // S above
  Eigen::MatrixXd rhs;             // W_O^{1/2} C_OM (w_M .* phi_M), one column per j
};

CompletionOperator build_completion(const ObservationMask& mask, const GridDomain& grid,
                                    const Eigen::MatrixXd& cov, const EigenSystem& system,
                                    Eigen::Index m) {
  CompletionOperator op;
  op.obs = mask_indices(mask, true);
  op.mis = mask_indices(mask, false);
  const auto no = static_cast<Eigen::Index>(op.obs.size());
  const auto nm = static_cast<Eigen::Index>(op.mis.size());

  const Eigen::VectorXd w_obs_full = fragment_weights(mask, grid);
  const Eigen::VectorXd w_mis_full = fragment_weights(mask.complement(), grid);

  op.sqrt_w_obs.resize(no);
  for (Eigen::Index a = 0; a < no; ++a) op.sqrt_w_obs[a] = std::sqrt(w_obs_full[op.obs[a]]);

  op.sym.resize(no, no);
  for (Eigen::Index a = 0; a < no; ++a)
    for (Eigen::Index b = 0; b < no; ++b)
      op.sym(a, b) = op.sqrt_w_obs[a] * cov(op.obs[a], op.obs[b]) * op.sqrt_w_obs[b];
  op.sym = ((op.sym + op.sym.transpose()) / 2.0).eval();

  op.rhs.resize(no, m);
  Eigen::VectorXd wphi(nm);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index b = 0; b < nm; ++b)
      wphi[b] = w_mis_full[op.mis[b]] * system.eigenfunctions(op.mis[b], j);
    for (Eigen::Index a = 0; a < no; ++a) {
      double acc = 0.0;
      for (Eigen::Index b = 0; b < nm; ++b) acc += cov(op.obs[a], op.mis[b]) * wphi[b];
      op.rhs(a, j) = op.sqrt_w_obs[a] * acc;
    }
  }
  return op;
}

}  // namespace

PartialMoments partial_moments(const FunctionalDataset& dataset) {
  dataset.validate();
  const Eigen::Index n = dataset.n();
  const Eigen::Index p = dataset.grid.size();

  Eigen::VectorXi counts = Eigen::VectorXi::Zero(p);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = dataset.curves[i];
    for (Eigen::Index k = 0; k < p; ++k) {
      if (c.mask[k]) {
        counts[k] += 1;
        mean[k] += c.values[k];
      }
    }
  }
  {
    std::vector<Eigen::Index> bad;
    for (Eigen::Index k = 0; k < p; ++k)
      if (counts[k] < 1) bad.push_back(k);
    if (!bad.empty()) {
      std::ostringstream msg;
      msg << "partial_moments: no curve observed at grid point(s)";
      for (auto k : bad) msg << " " << k;
      raise(errc::coverage, msg.str());
    }
  }
  for (Eigen::Index k = 0; k < p; ++k) mean[k] /= static_cast<double>(counts[k]);

  Eigen::MatrixXi pair_counts = Eigen::MatrixXi::Zero(p, p);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd centered(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = dataset.curves[i];
    const auto obs = mask_indices(c.mask, true);
    for (auto k : obs) centered[k] = c.values[k] - mean[k];
    for (auto u : obs) {
      for (auto v : obs) {
        pair_counts(u, v) += 1;
        cov(u, v) += centered[u] * centered[v];
      }
    }
  }
  {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> bad;
    for (Eigen::Index u = 0; u < p && bad.size() < 8; ++u)
      for (Eigen::Index v = u; v < p && bad.size() < 8; ++v)
        if (pair_counts(u, v) < 2) bad.emplace_back(u, v);
    if (!bad.empty()) {
      std::ostringstream msg;
      msg << "partial_moments: fewer than 2 curves jointly observed at grid pair(s)";
      for (auto [u, v] : bad) msg << " (" << u << "," << v << ")";
      raise(errc::coverage, msg.str());
    }
  }
  for (Eigen::Index u = 0; u < p; ++u)
    for (Eigen::Index v = 0; v < p; ++v) cov(u, v) /= static_cast<double>(pair_counts(u, v));

  return PartialMoments{std::move(mean), CovarianceSurface(dataset.grid, std::move(cov)),
                        std::move(counts), std::move(pair_counts)};
}

CompletedScores complete_missing_scores(const FunctionalDataset& dataset,
                                        const PartialMoments& moments, const EigenSystem& system,
                                        Eigen::Index m, const RidgeCompletionConfig& config) {
  dataset.validate();
  if (m < 1 || m > system.count())
    raise(errc::invalid_argument, "complete_missing_scores: m out of range");

  double rho = 0.0;
  bool fallback = false;
  if (config.rho.has_value()) {
    rho = *config.rho;
    if (rho < 0) raise(errc::invalid_argument, "complete_missing_scores: rho must be >= 0");
  } else {
    rho = select_rho_gcv(dataset, moments, system, m, config, &fallback);
  }

  const Eigen::Index n = dataset.n();
  CompletedScores out;
  out.observed_part.resize(n, m);
  out.missing_part = Eigen::MatrixXd::Zero(n, m);
  out.xi_norms = Eigen::MatrixXd::Zero(n, m);
  out.chosen_rho.assign(static_cast<std::size_t>(n), rho);
  out.gcv_fallback = fallback;

  const Eigen::MatrixXd& cov = moments.cov.values();
  Eigen::VectorXd centered(dataset.grid.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& curve = dataset.curves[i];
    centered = curve.values - system.mean;
    for (Eigen::Index j = 0; j < m; ++j)
      out.observed_part(i, j) =
          masked_inner_product(centered, system.eigenfunctions.col(j), curve.mask, dataset.grid);

    if (curve.mask.is_full()) continue;

    const CompletionOperator op = build_completion(curve.mask, dataset.grid, cov, system, m);
    const auto no = static_cast<Eigen::Index>(op.obs.size());
    // The partial-moment surface need not be positive semidefinite on the
    // restricted block; clamp its spectrum at zero so (S + rho I) is the
    // well-posed operator the ridge equation assumes. The GCV evaluation
    // below uses the same clamped form.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.sym);
    if (es.info() != Eigen::Success)
      raise(errc::numeric,
            "complete_missing_scores: ridge solve failed for curve " + std::to_string(i));
    const Eigen::VectorXd evals = es.eigenvalues().cwiseMax(0.0);
    if (rho <= 0.0 && evals.minCoeff() <= 0.0)
      raise(errc::numeric, "complete_missing_scores: singular completion operator for curve " +
                               std::to_string(i) + " at rho=0");
    const Eigen::MatrixXd rhs_rot = es.eigenvectors().transpose() * op.rhs;
    const Eigen::MatrixXd eta =
        es.eigenvectors() * (rhs_rot.array().colwise() / (evals.array() + rho)).matrix();

    Eigen::VectorXd wx(no);
    for (Eigen::Index a = 0; a < no; ++a)
      wx[a] = op.sqrt_w_obs[a] * (curve.values[op.obs[a]] - system.mean[op.obs[a]]);
    for (Eigen::Index j = 0; j < m; ++j) {
      out.missing_part(i, j) = eta.col(j).dot(wx);
      out.xi_norms(i, j) = eta.col(j).norm();
    }
  }
  out.total = out.observed_part + out.missing_part;
  return out;
}

double select_rho_gcv(const FunctionalDataset& dataset, const PartialMoments& moments,
                      const EigenSystem& system, Eigen::Index m,
                      const RidgeCompletionConfig& config, bool* fallback) {
  if (system.count() < 1) raise(errc::degenerate_spectrum, "select_rho_gcv: empty spectrum");
  const std::vector<double> grid_rho = config.effective_grid(system.eigenvalues[0]);
  if (grid_rho.empty()) raise(errc::configuration, "select_rho_gcv: empty rho grid");
  if (fallback) *fallback = false;

  std::vector<Eigen::Index> complete, incomplete;
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    (dataset.curves[i].mask.is_full() ? complete : incomplete).push_back(i);
  }
  const auto n_c = static_cast<Eigen::Index>(complete.size());

  const auto median_of = [](std::vector<double> g) {
    std::sort(g.begin(), g.end());
    return g[g.size() / 2];
  };
  if (incomplete.empty() || n_c < config.min_complete_for_gcv) {
    if (fallback) *fallback = true;
    return median_of(grid_rho);
  }

  // One eigendecomposition per transplanted pattern, reused for every rho.
  struct Pattern {
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;
    Eigen::MatrixXd rhs_rot;  // V^T rhs
    std::vector<Eigen::Index> obs, mis;
    Eigen::VectorXd sqrt_w_obs;
    Eigen::VectorXd w_mis;  // fragment weights restricted to M
    Eigen::MatrixXd phi_mis;
  };
  const auto n_pat = std::min<std::size_t>(incomplete.size(), static_cast<std::size_t>(n_c));
  std::vector<Pattern> patterns(n_pat);
  for (std::size_t q = 0; q < n_pat; ++q) {
    const ObservationMask& mask = dataset.curves[incomplete[q]].mask;
    CompletionOperator op = build_completion(mask, dataset.grid, moments.cov.values(), system, m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.sym);
    if (es.info() != Eigen::Success) raise(errc::numeric, "select_rho_gcv: eigensolver failed");
    Pattern& pat = patterns[q];
    pat.evals = es.eigenvalues().cwiseMax(0.0);
    pat.evecs = es.eigenvectors();
    pat.rhs_rot = pat.evecs.transpose() * op.rhs;
    pat.obs = std::move(op.obs);
    pat.mis = std::move(op.mis);
    pat.sqrt_w_obs = std::move(op.sqrt_w_obs);
    const Eigen::VectorXd w_mis_full = fragment_weights(mask.complement(), dataset.grid);
    pat.w_mis.resize(static_cast<Eigen::Index>(pat.mis.size()));
    pat.phi_mis.resize(static_cast<Eigen::Index>(pat.mis.size()), m);
    for (std::size_t b = 0; b < pat.mis.size(); ++b) {
      pat.w_mis[static_cast<Eigen::Index>(b)] = w_mis_full[pat.mis[b]];
      pat.phi_mis.row(static_cast<Eigen::Index>(b)) =
          system.eigenfunctions.row(pat.mis[b]).head(m);
    }
  }

  double best_score = std::numeric_limits<double>::infinity();
  double best_rho = grid_rho.front();
  bool any_valid = false;
  for (double rho : grid_rho) {
    double sse = 0.0;
    double df_sum = 0.0;
    for (Eigen::Index k = 0; k < n_c; ++k) {
      const Pattern& pat = patterns[static_cast<std::size_t>(k) % n_pat];
      const auto& curve = dataset.curves[complete[static_cast<std::size_t>(k)]];

      // truth: masked-part quadrature scores of the (fully observed) curve
      // prediction: eta = V (L + rho)^{-1} V^T rhs, inner product with W^{1/2}x
      Eigen::VectorXd wx(static_cast<Eigen::Index>(pat.obs.size()));
      for (std::size_t a = 0; a < pat.obs.size(); ++a)
        wx[static_cast<Eigen::Index>(a)] =
            pat.sqrt_w_obs[static_cast<Eigen::Index>(a)] *
            (curve.values[pat.obs[a]] - system.mean[pat.obs[a]]);
      const Eigen::VectorXd wx_rot = pat.evecs.transpose() * wx;

      for (Eigen::Index j = 0; j < m; ++j) {
        double truth = 0.0;
        for (std::size_t b = 0; b < pat.mis.size(); ++b)
          truth += pat.w_mis[static_cast<Eigen::Index>(b)] *
                   (curve.values[pat.mis[b]] - system.mean[pat.mis[b]]) *
                   pat.phi_mis(static_cast<Eigen::Index>(b), j);
        double pred = 0.0;
        for (Eigen::Index a = 0; a < wx_rot.size(); ++a)
          pred += pat.rhs_rot(a, j) / (pat.evals[a] + rho) * wx_rot[a];
        sse += (pred - truth) * (pred - truth);
      }
      df_sum += (pat.evals.array() / (pat.evals.array() + rho)).sum();
    }
    const double df = df_sum / static_cast<double>(n_c);
    if (df >= static_cast<double>(n_c)) continue;  // degenerate GCV denominator
    const double denom = 1.0 - df / static_cast<double>(n_c);
    const double score = sse / (denom * denom);
    if (score < best_score) {
      best_score = score;
      best_rho = rho;
      any_valid = true;
    }
  }
  if (!any_valid) {
    if (fallback) *fallback = true;
    return median_of(grid_rho);
  }
  return best_rho;
}

NmeFit fit_nme(const FunctionalDataset& dataset, const FitOptions& options) {
  NmeFit fit;
  PartialMoments moments = [&] {
    try {
      return partial_moments(dataset);
    } catch (const error& e) {
      rethrow_staged(e, "fit_nme[partial_moments]");
    }
  }();

  try {
    fit.system = eigendecompose(moments.cov, dataset.grid.size());
  } catch (const error& e) {
    rethrow_staged(e, "fit_nme[eigendecompose]");
  }
  fit.system.mean = moments.mean;
  fit.system.noise_variance = 0.0;

  Eigen::Index m = 0;
  try {
    m = select_m_fve(fit.system.eigenvalues, options.fve_threshold);
  } catch (const error& e) {
    rethrow_staged(e, "fit_nme[select_m_fve]");
  }

  try {
    fit.scores = complete_missing_scores(dataset, moments, fit.system, m, options.ridge);
  } catch (const error& e) {
    rethrow_staged(e, "fit_nme[complete_missing_scores]");
  }
  fit.rho = fit.scores.chosen_rho.empty() ? 0.0 : fit.scores.chosen_rho.front();
  if (fit.scores.gcv_fallback)
    fit.warnings.push_back("gcv fallback: too few complete curves, used median of rho grid");

  try {
    ScoreMatrix scores{fit.scores.total};
    fit.slope = fit_slope(scores, dataset.responses, fit.system, m);
  } catch (const error& e) {
    rethrow_staged(e, "fit_nme[fit_slope]");
  }
  return fit;
}

Eigen::VectorXd reconstruct_curve(const ObservedCurve& curve, const EigenSystem& system,
                                  const Eigen::VectorXd& scores, Eigen::Index m) {
  if (m < 1 || m > system.count() || m > scores.size())
    raise(errc::invalid_argument, "reconstruct_curve: m exceeds available components");
  (void)curve;
  return system.mean + system.eigenfunctions.leftCols(m) * scores.head(m);
}

}  // namespace fraglm
