#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "fraglm/grid.hpp"
#include "fraglm/rng.hpp"

namespace fraglm {

enum class Scenario { noiseless_rank2 = 1, noisy_50term = 2 };

struct ScenarioConfig {
  Scenario scenario = Scenario::noiseless_rank2;
  Eigen::Index n = 50;
  Eigen::Index grid_points = 30;
  double a1 = 1.5;
  double a2 = 0.2;
  double noise_sd_obs = 0.5;    // measurement error sd on Z (scenario 2)
  double noise_sd_model = 1.0;  // model error sd on Y (scenario 2 default: 0.5)
  std::uint64_t seed = 1;
  Eigen::Index replications = 1;

  static ScenarioConfig defaults(Scenario s) {
    ScenarioConfig c;
    c.scenario = s;
    c.noise_sd_model = (s == Scenario::noiseless_rank2) ? 1.0 : 0.5;
    c.replications = (s == Scenario::noiseless_rank2) ? 1000 : 100;
    return c;
  }

  void validate() const;
};

// Everything the generator knows: the true slope, eigenstructure and the
// sampled scores, kept for oracle checks and MISE evaluation.
struct TruthBundle {
  Eigen::VectorXd gamma_true;
  Eigen::MatrixXd eigenfunctions_true;  // p x K
  std::vector<double> eigenvalues_true;
  Eigen::MatrixXd scores_true;  // n x K
};

struct SimulatedData {
  FunctionalDataset dataset;
  TruthBundle truth;
};

// Missing interval M = [a1 sqrt(T1) - a2 T2, a1 sqrt(T1) + a2 T2] clipped to
// the domain; the mask is true exactly at grid points outside M.
ObservationMask missing_mask_from_uniforms(double a1, double a2, const GridDomain& grid, double t1,
                                           double t2);
ObservationMask gen_missing_mask(double a1, double a2, const GridDomain& grid, CounterRng& rng);

SimulatedData gen_scenario1(const ScenarioConfig& config, std::uint64_t rep_index);
SimulatedData gen_scenario2(const ScenarioConfig& config, std::uint64_t rep_index);
SimulatedData generate(const ScenarioConfig& config, std::uint64_t rep_index);

}  // namespace fraglm
