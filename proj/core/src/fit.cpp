#include "fraglm/fit.hpp"

#include <chrono>

namespace fraglm {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Shared complete-data pipeline (the ORI reference): partial moments reduce
// to the sample mean / sample covariance when every mask is full, which
// keeps this path bit-identical to fit_nme on fully observed data.
FitResult complete_data_fit(const FunctionalDataset& dataset, const FitOptions& options,
                            Method tag) {
  const auto start = std::chrono::steady_clock::now();
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    if (!dataset.curves[i].mask.is_full())
      raise(errc::invalid_argument,
            method_name(tag) + ": curve " + std::to_string(i) + " is not fully observed");
  }
  FitResult fit;
  fit.method = tag;
  const PartialMoments moments = partial_moments(dataset);
  fit.system = eigendecompose(moments.cov, dataset.grid.size());
  fit.system.mean = moments.mean;
  const Eigen::Index m = select_m_fve(fit.system.eigenvalues, options.fve_threshold);
  fit.scores = complete_scores(dataset, fit.system, m);
  fit.slope = fit_slope(fit.scores, dataset.responses, fit.system, m);
  fit.seconds = seconds_since(start);
  return fit;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::ori: return "ori";
    case Method::sub: return "sub";
    case Method::nme: return "nme";
    case Method::in: return "in";
    case Method::wme: return "wme";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "ori") return Method::ori;
  if (name == "sub") return Method::sub;
  if (name == "nme") return Method::nme;
  if (name == "in") return Method::in;
  if (name == "wme") return Method::wme;
  raise(errc::invalid_argument, "unknown method '" + name + "'");
}

FitResult fit_ori(const FunctionalDataset& dataset, const FitOptions& options) {
  return complete_data_fit(dataset, options, Method::ori);
}

FitResult fit_sub(const FunctionalDataset& dataset, const FitOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  FunctionalDataset subset;
  subset.grid = dataset.grid;
  subset.noisy = dataset.noisy;
  std::vector<double> y;
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    if (dataset.curves[i].mask.is_full()) {
      subset.curves.push_back(dataset.curves[i]);
      y.push_back(dataset.responses[i]);
    }
  }
  if (subset.curves.size() < 2)
    raise(errc::insufficient_data, "fit_sub: only " + std::to_string(subset.curves.size()) +
                                       " complete curve(s) remain after deletion");
  subset.responses = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  FitResult fit = complete_data_fit(subset, options, Method::sub);
  fit.seconds = seconds_since(start);
  return fit;
}

FitResult fit_in(const FunctionalDataset& dataset, const FitOptions& options) {
  const SmoothedMoments moments = [&] {
    try {
      return smooth_moments(dataset, options);
    } catch (const error& e) {
      rethrow_staged(e, "fit_in[smooth_moments]");
    }
  }();
  return fit_in(dataset, options, moments);
}

FitResult fit_in(const FunctionalDataset& dataset, const FitOptions& options,
                 const SmoothedMoments& moments) {
  const auto start = std::chrono::steady_clock::now();
  FitResult fit;
  fit.method = Method::in;
  fit.system = moments.system;
  fit.noise = moments.noise;
  fit.h_mu = moments.h_mu;
  fit.h_c = moments.h_c;

  Eigen::Index m = 0;
  try {
    m = select_m_fve(fit.system.eigenvalues, options.fve_threshold);
  } catch (const error& e) {
    rethrow_staged(e, "fit_in[select_m_fve]");
  }

  // Fragment quadrature scores against the smoothed eigensystem; by default
  // rescaled to the full domain by |T| / |O_i|.
  fit.scores.entries.resize(dataset.n(), m);
  Eigen::VectorXd centered(dataset.grid.size());
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    const auto& curve = dataset.curves[i];
    for (Eigen::Index k = 0; k < dataset.grid.size(); ++k)
      centered[k] = curve.mask[k] ? curve.values[k] - fit.system.mean[k] : 0.0;
    double scale = 1.0;
    if (options.rescale_in_scores && !curve.mask.is_full()) {
      const double frag_len = fragment_weights(curve.mask, dataset.grid).sum();
      if (frag_len > 0.0) scale = dataset.grid.length() / frag_len;
    }
    for (Eigen::Index j = 0; j < m; ++j)
      fit.scores.entries(i, j) =
          scale * masked_inner_product(centered, fit.system.eigenfunctions.col(j), curve.mask,
                                       dataset.grid);
  }

  try {
    fit.slope = fit_slope(fit.scores, dataset.responses, fit.system, m);
  } catch (const error& e) {
    rethrow_staged(e, "fit_in[fit_slope]");
  }
  fit.seconds = seconds_since(start);
  return fit;
}

FitResult fit_method(Method method, const FunctionalDataset& dataset, const FitOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  switch (method) {
    case Method::ori:
      return fit_ori(dataset, options);
    case Method::sub:
      return fit_sub(dataset, options);
    case Method::in:
      return fit_in(dataset, options);
    case Method::nme: {
      NmeFit nme = fit_nme(dataset, options);
      FitResult fit;
      fit.method = Method::nme;
      fit.slope = std::move(nme.slope);
      fit.system = std::move(nme.system);
      fit.scores.entries = nme.scores.total;
      fit.completed = std::move(nme.scores);
      fit.rho = nme.rho;
      fit.warnings = std::move(nme.warnings);
      fit.seconds = seconds_since(start);
      return fit;
    }
    case Method::wme: {
      WmeFit wme = fit_wme(dataset, options);
      FitResult fit;
      fit.method = Method::wme;
      fit.slope = std::move(wme.slope);
      fit.system = std::move(wme.system);
      fit.scores = std::move(wme.scores);
      fit.noise = std::move(wme.noise);
      fit.h_mu = wme.h_mu;
      fit.h_c = wme.h_c;
      fit.warnings = std::move(wme.warnings);
      fit.seconds = seconds_since(start);
      return fit;
    }
  }
  raise(errc::invalid_argument, "fit_method: unknown method");
}

}  // namespace fraglm
