#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fraglm/fit.hpp"
#include "fraglm/simulate.hpp"

namespace fraglm {

struct MCResult {
  Method method = Method::ori;
  ScenarioConfig config;
  double mise = 0.0;
  std::vector<double> per_rep_ise;  // successful replications only
  double wall_time = 0.0;           // summed fit seconds across replications
  std::size_t excluded = 0;         // failed replications (also listed in warnings)
  std::vector<std::string> warnings;
};

double integrated_square_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth,
                               const GridDomain& grid);

// MISE = mean of the per-replication integrated squared errors.
std::pair<double, std::vector<double>> mise(const std::vector<SlopeEstimate>& estimates,
                                            const Eigen::VectorXd& gamma_true,
                                            const GridDomain& grid);

// Worker cap from FRAGLM_THREADS, else hardware concurrency.
unsigned max_threads();

// Runs fn(0..count-1) on a small worker pool; tasks must only touch their
// own output slots so results match serial execution.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// Shared-dataset Monte Carlo: every method sees the same replication data
// (ORI sees the unmasked view). Per-replication failures are excluded from
// the MISE and reported, never swallowed.
std::vector<MCResult> run_monte_carlo(const ScenarioConfig& config,
                                      const std::vector<Method>& methods,
                                      const FitOptions& options);

}  // namespace fraglm
