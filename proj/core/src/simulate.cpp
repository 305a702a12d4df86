#include "fraglm/simulate.hpp"

#include <cmath>

namespace fraglm {

namespace {

constexpr int kScenario2Terms = 50;

CounterRng stream(const ScenarioConfig& config, std::uint64_t rep, RngPurpose purpose) {
  return CounterRng(CounterRng::derive_key(config.seed, rep, static_cast<std::uint64_t>(purpose)));
}

}  // namespace

void ScenarioConfig::validate() const {
  if (n < 2) raise(errc::invalid_argument, "scenario config: n must be >= 2");
  if (grid_points < 2) raise(errc::invalid_argument, "scenario config: grid_points must be >= 2");
  if (a2 < 0) raise(errc::invalid_argument, "scenario config: a2 must be >= 0");
  if (replications < 1) raise(errc::invalid_argument, "scenario config: replications must be >= 1");
}

ObservationMask missing_mask_from_uniforms(double a1, double a2, const GridDomain& grid, double t1,
                                           double t2) {
  const double center = a1 * std::sqrt(t1);
  const double half = a2 * t2;
  const double lo = center - half;
  const double hi = center + half;
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(grid.size()));
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const double t = grid.points[k];
    flags[static_cast<std::size_t>(k)] = (t >= lo && t <= hi) ? 0 : 1;
  }
  return ObservationMask(std::move(flags));  // throws empty-support if M covers the whole grid
}

ObservationMask gen_missing_mask(double a1, double a2, const GridDomain& grid, CounterRng& rng) {
  const double t1 = rng.next_uniform();
  const double t2 = rng.next_uniform();
  return missing_mask_from_uniforms(a1, a2, grid, t1, t2);
}

SimulatedData gen_scenario1(const ScenarioConfig& config, std::uint64_t rep_index) {
  config.validate();
  if (config.scenario != Scenario::noiseless_rank2)
    raise(errc::invalid_argument, "gen_scenario1: config targets another scenario");

  const GridDomain grid = make_grid(0.0, 1.0, config.grid_points);
  const Eigen::Index p = grid.size();
  const Eigen::Index n = config.n;

  Eigen::MatrixXd phis(p, 2);
  for (Eigen::Index k = 0; k < p; ++k) {
    phis(k, 0) = std::sqrt(2.0) * std::sin(M_PI * grid.points[k] / 2.0);
    phis(k, 1) = std::sqrt(2.0) * std::sin(3.0 * M_PI * grid.points[k] / 2.0);
  }
  const double lambda1 = std::pow(M_PI / 2.0, -2.0);
  const double lambda2 = std::pow(3.0 * M_PI / 2.0, -2.0);

  TruthBundle truth;
  truth.eigenfunctions_true = phis;
  truth.eigenvalues_true = {lambda1, lambda2};
  truth.gamma_true = phis.col(0) + 3.0 * phis.col(1);
  truth.scores_true.resize(n, 2);

  CounterRng score_rng = stream(config, rep_index, RngPurpose::scores);
  CounterRng model_rng = stream(config, rep_index, RngPurpose::model_noise);
  CounterRng mask_rng = stream(config, rep_index, RngPurpose::mask);

  FunctionalDataset data;
  data.grid = grid;
  data.noisy = false;
  data.responses.resize(n);
  data.curves.reserve(static_cast<std::size_t>(n));

  for (Eigen::Index i = 0; i < n; ++i) {
    const double u1 = std::sqrt(lambda1) * score_rng.next_gaussian();
    const double u2 = std::sqrt(lambda2) * score_rng.next_gaussian();
    truth.scores_true(i, 0) = u1;
    truth.scores_true(i, 1) = u2;
    Eigen::VectorXd x = u1 * phis.col(0) + u2 * phis.col(1);
    // responses come from the full curve, before any mask is applied
    data.responses[i] = inner_product(truth.gamma_true, x, grid) +
                        config.noise_sd_model * model_rng.next_gaussian();
    data.curves.push_back(
        ObservedCurve{std::move(x), gen_missing_mask(config.a1, config.a2, grid, mask_rng)});
  }
  return SimulatedData{std::move(data), std::move(truth)};
}

SimulatedData gen_scenario2(const ScenarioConfig& config, std::uint64_t rep_index) {
  config.validate();
  if (config.scenario != Scenario::noisy_50term)
    raise(errc::invalid_argument, "gen_scenario2: config targets another scenario");

  const GridDomain grid = make_grid(0.0, 1.0, config.grid_points);
  const Eigen::Index p = grid.size();
  const Eigen::Index n = config.n;
  const int terms = kScenario2Terms;

  Eigen::MatrixXd phis(p, terms);
  phis.col(0).setOnes();
  for (int j = 2; j <= terms; ++j)
    for (Eigen::Index k = 0; k < p; ++k)
      phis(k, j - 1) = std::sqrt(2.0) * std::cos(j * M_PI * grid.points[k]);

  Eigen::VectorXd gamma_coef(terms);
  gamma_coef[0] = 0.3;
  for (int j = 2; j <= terms; ++j)
    gamma_coef[j - 1] = 4.0 * ((j % 2 == 1) ? 1.0 : -1.0) / (static_cast<double>(j) * j);

  Eigen::VectorXd score_sd(terms);
  for (int j = 1; j <= terms; ++j)
    score_sd[j - 1] = ((j % 2 == 1) ? 1.0 : -1.0) * std::pow(static_cast<double>(j), -1.1 / 2.0);

  TruthBundle truth;
  truth.eigenfunctions_true = phis;
  truth.eigenvalues_true.resize(terms);
  for (int j = 1; j <= terms; ++j)
    truth.eigenvalues_true[static_cast<std::size_t>(j - 1)] =
        std::pow(static_cast<double>(j), -1.1);
  truth.gamma_true = phis * gamma_coef;
  truth.scores_true.resize(n, terms);

  CounterRng score_rng = stream(config, rep_index, RngPurpose::scores);
  CounterRng model_rng = stream(config, rep_index, RngPurpose::model_noise);
  CounterRng obs_rng = stream(config, rep_index, RngPurpose::obs_noise);
  CounterRng mask_rng = stream(config, rep_index, RngPurpose::mask);

  FunctionalDataset data;
  data.grid = grid;
  data.noisy = true;
  data.responses.resize(n);
  data.curves.reserve(static_cast<std::size_t>(n));

  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < terms; ++j)
      truth.scores_true(i, j) = score_sd[j] * score_rng.next_uniform_sym3();
    const Eigen::VectorXd x = phis * truth.scores_true.row(i).transpose();
    data.responses[i] = inner_product(truth.gamma_true, x, grid) +
                        config.noise_sd_model * model_rng.next_gaussian();
    // observations carry measurement error at every grid point; the mask
    // decides which of them are visible
    Eigen::VectorXd z(p);
    for (Eigen::Index k = 0; k < p; ++k)
      z[k] = x[k] + config.noise_sd_obs * obs_rng.next_gaussian();
    data.curves.push_back(
        ObservedCurve{std::move(z), gen_missing_mask(config.a1, config.a2, grid, mask_rng)});
  }
  return SimulatedData{std::move(data), std::move(truth)};
}

SimulatedData generate(const ScenarioConfig& config, std::uint64_t rep_index) {
  return config.scenario == Scenario::noiseless_rank2 ? gen_scenario1(config, rep_index)
                                                      : gen_scenario2(config, rep_index);
}

}  // namespace fraglm
