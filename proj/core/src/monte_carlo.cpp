#include "fraglm/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

namespace fraglm {

double integrated_square_error(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth,
                               const GridDomain& grid) {
  if (estimate.size() != grid.size() || truth.size() != grid.size())
    raise(errc::invalid_argument, "integrated_square_error: grid mismatch");
  const Eigen::VectorXd diff = estimate - truth;
  return inner_product(diff, diff, grid);
}

std::pair<double, std::vector<double>> mise(const std::vector<SlopeEstimate>& estimates,
                                            const Eigen::VectorXd& gamma_true,
                                            const GridDomain& grid) {
  if (estimates.empty()) raise(errc::invalid_argument, "mise: empty estimate list");
  std::vector<double> ise;
  ise.reserve(estimates.size());
  for (const auto& est : estimates) ise.push_back(integrated_square_error(est.gamma, gamma_true, grid));
  double sum = 0.0;
  for (double v : ise) sum += v;
  return {sum / static_cast<double>(ise.size()), std::move(ise)};
}

unsigned max_threads() {
  if (const char* env = std::getenv("FRAGLM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::min<std::size_t>(max_threads(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<MCResult> run_monte_carlo(const ScenarioConfig& config,
                                      const std::vector<Method>& methods,
                                      const FitOptions& options) {
  config.validate();
  if (methods.empty()) raise(errc::invalid_argument, "run_monte_carlo: no methods requested");

  const auto reps = static_cast<std::size_t>(config.replications);
  const std::size_t n_methods = methods.size();
  const bool shares_smoothing =
      std::count(methods.begin(), methods.end(), Method::wme) &&
      std::count(methods.begin(), methods.end(), Method::in);

  struct RepOutcome {
    std::vector<double> ise;             // per method; NaN marks failure
    std::vector<std::string> failures;   // per method; empty when fine
    std::vector<double> seconds;
  };
  std::vector<RepOutcome> outcomes(reps);

  parallel_for(reps, [&](std::size_t r) {
    RepOutcome& out = outcomes[r];
    out.ise.assign(n_methods, std::numeric_limits<double>::quiet_NaN());
    out.failures.assign(n_methods, "");
    out.seconds.assign(n_methods, 0.0);

    const SimulatedData sim = generate(config, static_cast<std::uint64_t>(r));

    // ORI consumes the pre-mask view of the same replication.
    FunctionalDataset full_view;
    if (std::count(methods.begin(), methods.end(), Method::ori)) {
      full_view.grid = sim.dataset.grid;
      full_view.noisy = sim.dataset.noisy;
      full_view.responses = sim.dataset.responses;
      for (const auto& c : sim.dataset.curves)
        full_view.curves.push_back(
            ObservedCurve{c.values, ObservationMask::full(sim.dataset.grid.size())});
    }

    std::optional<SmoothedMoments> shared;
    if (shares_smoothing) {
      try {
        shared = smooth_moments(sim.dataset, options);
      } catch (const error&) {
        shared.reset();  // both methods will fail and report individually
      }
    }

    for (std::size_t q = 0; q < n_methods; ++q) {
      const auto start = std::chrono::steady_clock::now();
      try {
        SlopeEstimate slope;
        if (methods[q] == Method::ori) {
          slope = fit_method(Method::ori, full_view, options).slope;
        } else if (shared && methods[q] == Method::wme) {
          slope = fit_wme(sim.dataset, options, *shared).slope;
        } else if (shared && methods[q] == Method::in) {
          slope = fit_in(sim.dataset, options, *shared).slope;
        } else {
          slope = fit_method(methods[q], sim.dataset, options).slope;
        }
        out.ise[q] = integrated_square_error(slope.gamma, sim.truth.gamma_true, sim.dataset.grid);
      } catch (const error& e) {
        out.failures[q] = e.what();
      }
      out.seconds[q] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  });

  std::vector<MCResult> results(n_methods);
  for (std::size_t q = 0; q < n_methods; ++q) {
    MCResult& res = results[q];
    res.method = methods[q];
    res.config = config;
    for (std::size_t r = 0; r < reps; ++r) {
      if (!outcomes[r].failures[q].empty()) {
        ++res.excluded;
        res.warnings.push_back("rep " + std::to_string(r) + ": " + outcomes[r].failures[q]);
      } else {
        res.per_rep_ise.push_back(outcomes[r].ise[q]);
      }
      res.wall_time += outcomes[r].seconds[q];
    }
    if (res.per_rep_ise.empty())
      raise(errc::numeric, "run_monte_carlo: every replication failed for method " +
                               method_name(methods[q]));
    double sum = 0.0;
    for (double v : res.per_rep_ise) sum += v;
    res.mise = sum / static_cast<double>(res.per_rep_ise.size());
    if (res.excluded > 0)
      res.warnings.push_back(std::to_string(res.excluded) + " replication(s) excluded from MISE");
  }
  return results;
}

}  // namespace fraglm
