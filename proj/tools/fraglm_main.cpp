// Command line front end: simulate / fit / benchmark / reconstruct.
#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "fraglm/dataset_io.hpp"
#include "fraglm/fit.hpp"
#include "fraglm/monte_carlo.hpp"
#include "fraglm/nme.hpp"
#include "fraglm/simulate.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace fraglm;

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::vector<long> parse_long_list(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stol(item));
  }
  return out;
}

KernelFamily kernel_from_name(const std::string& name) {
  if (name == "epanechnikov") return KernelFamily::epanechnikov;
  if (name == "quartic") return KernelFamily::quartic;
  if (name == "triangular") return KernelFamily::triangular;
  raise(errc::invalid_argument, "unknown kernel '" + name + "'");
}

// Options file keys mirror the option struct field names.
void apply_config_file(FitOptions& options, const std::string& path) {
  const auto kv = read_kv_file(path);
  for (const auto& [key, value] : kv) {
    if (key == "fve_threshold") {
      options.fve_threshold = std::stod(value);
    } else if (key == "rho") {
      if (value == "AUTO" || value == "auto")
        options.ridge.rho.reset();
      else
        options.ridge.rho = std::stod(value);
    } else if (key == "rho_grid") {
      options.ridge.rho_grid = parse_double_list(value);
    } else if (key == "min_complete_for_gcv") {
      options.ridge.min_complete_for_gcv = std::stoi(value);
    } else if (key == "h_mu") {
      options.bandwidths.h_mu = std::stod(value);
      options.bandwidths.mode = BandwidthMode::fixed;
    } else if (key == "h_c") {
      options.bandwidths.h_c = std::stod(value);
      options.bandwidths.mode = BandwidthMode::fixed;
    } else if (key == "kernel") {
      options.kernel.family = kernel_from_name(value);
    } else if (key == "pace_sigma") {
      if (value != "fitted" && value != "raw")
        raise(errc::configuration, "pace_sigma must be 'fitted' or 'raw'");
      options.pace_sigma = value == "raw" ? PaceSigma::raw : PaceSigma::fitted;
    } else if (key == "rescale_in_scores") {
      options.rescale_in_scores = (value == "1" || value == "true");
    } else {
      raise(errc::configuration, "config: unknown key '" + key + "'");
    }
  }
}

std::string kernel_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::epanechnikov: return "epanechnikov";
    case KernelFamily::quartic: return "quartic";
    case KernelFamily::triangular: return "triangular";
  }
  return "?";
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v[k]);
  return arr;
}

GridDomain grid_for_data(const std::string& data_path, std::string meta_path,
                         ScenarioConfig* config_out) {
  if (meta_path.empty()) meta_path = data_path + ".meta";
  const ScenarioConfig config = meta_to_config(read_kv_file(meta_path));
  if (config_out) *config_out = config;
  return make_grid(0.0, 1.0, config.grid_points);
}

int run_simulate(const std::string& out_path, int scenario, long n, double a1, double a2,
                 std::uint64_t seed, long grid_points, double noise_sd_obs,
                 double noise_sd_model) {
  ScenarioConfig config = ScenarioConfig::defaults(scenario == 1 ? Scenario::noiseless_rank2
                                                                 : Scenario::noisy_50term);
  config.n = n;
  config.a1 = a1;
  config.a2 = a2;
  config.seed = seed;
  config.grid_points = grid_points;
  if (noise_sd_obs >= 0) config.noise_sd_obs = noise_sd_obs;
  if (noise_sd_model >= 0) config.noise_sd_model = noise_sd_model;

  const SimulatedData sim = generate(config, 0);
  write_dataset_csv(out_path, sim.dataset);
  write_meta(out_path + ".meta", config);
  write_truth_csv(out_path + ".truth.csv", sim.dataset.grid, sim.truth);
  std::cout << "wrote " << out_path << " (+.meta, +.truth.csv): n=" << sim.dataset.n()
            << " grid=" << sim.dataset.grid.size() << "\n";
  return 0;
}

int run_fit(const std::string& data_path, const std::string& meta_path,
            const std::string& method_name_str, const FitOptions& options,
            const std::string& out_path, const std::string& dump_eigen_path) {
  ScenarioConfig config;
  const GridDomain grid = grid_for_data(data_path, meta_path, &config);
  const FunctionalDataset dataset =
      read_dataset_csv(data_path, grid, config.scenario == Scenario::noisy_50term);
  const Method method = method_from_name(method_name_str);
  const FitResult fit = fit_method(method, dataset, options);

  json result;
  result["method"] = method_name(method);
  result["m"] = fit.slope.m;
  result["intercept"] = fit.slope.intercept;
  result["coefficients"] = vector_to_json(fit.slope.coefficients);
  result["gamma"] = vector_to_json(fit.slope.gamma);
  result["grid"] = {{"t_min", grid.t_min}, {"t_max", grid.t_max}, {"points", grid.size()}};
  json diag;
  diag["eigenvalues"] = fit.system.eigenvalues;
  diag["fve_threshold"] = options.fve_threshold;
  if (fit.noise) diag["sigma2"] = fit.noise->sigma2;
  if (fit.rho) diag["rho"] = *fit.rho;
  if (fit.h_mu) diag["h_mu"] = *fit.h_mu;
  if (fit.h_c) diag["h_c"] = *fit.h_c;
  if (method == Method::wme || method == Method::in)
    diag["kernel"] = kernel_name(options.kernel.family);
  diag["warnings"] = fit.warnings;
  result["diagnostics"] = diag;
  result["timings"] = {{"seconds", fit.seconds}};

  if (out_path.empty()) {
    std::cout << result.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) raise(errc::invalid_argument, "cannot open '" + out_path + "'");
    out << result.dump(2) << "\n";
  }
  if (!dump_eigen_path.empty()) write_eigen_csv(dump_eigen_path, fit.system);
  return 0;
}

double measured_clipped_missing_length(double a1, double a2, std::uint64_t seed) {
  CounterRng rng(CounterRng::derive_key(seed, 0, 99));
  const int draws = 100000;
  double acc = 0.0;
  for (int d = 0; d < draws; ++d) {
    const double center = a1 * std::sqrt(rng.next_uniform());
    const double half = a2 * rng.next_uniform();
    const double lo = std::max(center - half, 0.0);
    const double hi = std::min(center + half, 1.0);
    if (hi > lo) acc += hi - lo;
  }
  return acc / draws;
}

int run_benchmark(int scenario, const std::string& methods_csv, long reps_override, bool fast,
                  std::uint64_t seed, const std::string& n_csv, double a1,
                  const std::string& a2_csv, FitOptions options, const std::string& out_path,
                  double fve_override) {
  const Scenario scen = scenario == 1 ? Scenario::noiseless_rank2 : Scenario::noisy_50term;
  std::vector<Method> methods;
  {
    std::stringstream ss(methods_csv);
    std::string item;
    while (std::getline(ss, item, ',')) methods.push_back(method_from_name(item));
  }
  if (methods.empty()) raise(errc::invalid_argument, "benchmark: no methods given");
  const std::vector<long> ns = parse_long_list(n_csv);
  const std::vector<double> a2s = parse_double_list(a2_csv);
  long reps = reps_override;
  if (reps <= 0) reps = scen == Scenario::noiseless_rank2 ? (fast ? 200 : 1000) : (fast ? 50 : 100);
  if (fve_override > 0) options.fve_threshold = fve_override;

  std::ostringstream table;
  table << "method,a1,a2,expected_missing_length";
  for (long n : ns) table << ",n=" << n;
  table << "\n";

  for (double a2 : a2s) {
    const double miss_len = measured_clipped_missing_length(a1, a2, seed);
    std::vector<std::vector<MCResult>> per_n;
    for (long n : ns) {
      ScenarioConfig config = ScenarioConfig::defaults(scen);
      config.n = n;
      config.a1 = a1;
      config.a2 = a2;
      config.seed = seed;
      config.replications = reps;
      per_n.push_back(run_monte_carlo(config, methods, options));
      std::cerr << "done a2=" << a2 << " n=" << n << "\n";
    }
    for (std::size_t q = 0; q < methods.size(); ++q) {
      table << method_name(methods[q]) << "," << a1 << "," << a2 << ","
            << format_double(miss_len);
      for (std::size_t c = 0; c < ns.size(); ++c) table << "," << format_double(per_n[c][q].mise);
      table << "\n";
      for (const auto& nres : per_n)
        for (const auto& w : nres[q].warnings)
          std::cerr << "warning [" << method_name(methods[q]) << "]: " << w << "\n";
    }
  }

  if (out_path.empty()) {
    std::cout << table.str();
  } else {
    std::ofstream out(out_path);
    if (!out) raise(errc::invalid_argument, "cannot open '" + out_path + "'");
    out << table.str();
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int run_reconstruct(const std::string& data_path, const std::string& meta_path,
                    const std::string& curves_csv, const FitOptions& options,
                    const std::string& out_path) {
  ScenarioConfig config;
  const GridDomain grid = grid_for_data(data_path, meta_path, &config);
  const FunctionalDataset dataset =
      read_dataset_csv(data_path, grid, config.scenario == Scenario::noisy_50term);
  const NmeFit fit = fit_nme(dataset, options);
  const Eigen::Index m = fit.slope.m;

  std::vector<long> ids = parse_long_list(curves_csv);
  if (ids.empty()) raise(errc::invalid_argument, "reconstruct: no curve indices given");

  std::ofstream out(out_path);
  if (!out) raise(errc::invalid_argument, "cannot open '" + out_path + "'");
  out << "curve,t,observed,reconstructed\n";
  for (long id : ids) {
    if (id < 0 || id >= dataset.n())
      raise(errc::invalid_argument, "reconstruct: curve index " + std::to_string(id) +
                                        " out of range [0," + std::to_string(dataset.n() - 1) + "]");
    const auto& curve = dataset.curves[id];
    const Eigen::VectorXd scores = fit.scores.total.row(id).transpose();
    const Eigen::VectorXd recon = reconstruct_curve(curve, fit.system, scores, m);
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
      out << id << "," << format_double(grid.points[k]) << ",";
      if (curve.mask[k])
        out << format_double(curve.values[k]);
      else
        out << "NaN";
      out << "," << format_double(recon[k]) << "\n";
    }
  }
  std::cout << "wrote " << out_path << " (m=" << m << ", rho=" << fit.rho << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slope-function estimation for partially observed functional regression"};
  app.require_subcommand(1);

  // shared fit options
  std::string config_path, kernel_str, pace_sigma_str;
  double fve = -1, rho = -1, h_mu = -1, h_c = -1;
  bool no_in_rescale = false;
  const auto add_fit_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value options file");
    cmd->add_option("--fve", fve, "fraction-of-variance threshold for m");
    cmd->add_option("--rho", rho, "fixed ridge parameter (default: GCV)");
    cmd->add_option("--h-mu", h_mu, "mean smoother bandwidth");
    cmd->add_option("--h-c", h_c, "covariance smoother bandwidth");
    cmd->add_option("--kernel", kernel_str, "epanechnikov|quartic|triangular");
    cmd->add_option("--pace-sigma", pace_sigma_str,
                    "observation covariance in the conditional scores: fitted|raw");
    cmd->add_flag("--no-in-rescale", no_in_rescale,
                  "IN scores: integrate over the fragment without |T|/|O_i| rescaling");
  };
  const auto collect_options = [&]() {
    FitOptions options;
    if (!config_path.empty()) apply_config_file(options, config_path);
    if (fve > 0) options.fve_threshold = fve;
    if (rho >= 0) options.ridge.rho = rho;
    if (h_mu > 0) {
      options.bandwidths.h_mu = h_mu;
      options.bandwidths.mode = BandwidthMode::fixed;
    }
    if (h_c > 0) {
      options.bandwidths.h_c = h_c;
      options.bandwidths.mode = BandwidthMode::fixed;
    }
    if ((h_mu > 0) != (h_c > 0))
      fraglm::raise(fraglm::errc::configuration, "--h-mu and --h-c must be given together");
    if (!kernel_str.empty()) options.kernel.family = kernel_from_name(kernel_str);
    if (!pace_sigma_str.empty())
      options.pace_sigma = pace_sigma_str == "raw" ? PaceSigma::raw : PaceSigma::fitted;
    if (no_in_rescale) options.rescale_in_scores = false;
    return options;
  };

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a dataset CSV with truth sidecars");
  int scenario = 1;
  long n = 50, grid_points = 30, reps = -1;
  double a1 = 1.5, a2 = 0.2, noise_sd_obs = -1, noise_sd_model = -1;
  std::uint64_t seed = 1;
  std::string out_path, data_path, meta_path, method_str = "nme", methods_csv = "ori,nme,sub";
  std::string n_csv = "50,100,200", a2_csv = "0.2,0.4", curves_csv, dump_eigen_path;
  bool fast = false;
  sim->add_option("--scenario", scenario, "1 (noiseless) or 2 (measurement error)")
      ->check(CLI::IsMember({1, 2}));
  sim->add_option("--n", n, "number of curves");
  sim->add_option("--grid-points", grid_points, "grid size");
  sim->add_option("--a1", a1, "missing interval center scale");
  sim->add_option("--a2", a2, "missing interval half-length scale");
  sim->add_option("--seed", seed, "rng seed");
  sim->add_option("--noise-sd-obs", noise_sd_obs, "measurement error sd (scenario 2)");
  sim->add_option("--noise-sd-model", noise_sd_model, "model error sd");
  sim->add_option("--out", out_path, "output CSV path")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "fit a slope estimator to a dataset CSV");
  fit->add_option("--method", method_str, "ori|sub|nme|in|wme")->required();
  fit->add_option("--data", data_path, "dataset CSV")->required();
  fit->add_option("--meta", meta_path, "sidecar (default: <data>.meta)");
  fit->add_option("--out", out_path, "result JSON path (default: stdout)");
  fit->add_option("--dump-eigen", dump_eigen_path, "write the eigensystem to this CSV");
  add_fit_flags(fit);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Monte Carlo MISE table (rows method x (a1,a2))");
  bench->add_option("--scenario", scenario, "1 or 2")->check(CLI::IsMember({1, 2}));
  bench->add_option("--methods", methods_csv, "comma list of ori,sub,nme,in,wme");
  bench->add_option("--reps", reps, "replications (default: paper scale; --fast: desk scale)");
  bench->add_flag("--fast", fast, "desk-scale replication presets (200 / 50)");
  bench->add_option("--seed", seed, "rng seed");
  bench->add_option("--n", n_csv, "comma list of sample sizes");
  bench->add_option("--a1", a1, "missing interval center scale");
  bench->add_option("--a2", a2_csv, "comma list of a2 values");
  bench->add_option("--out", out_path, "table CSV path (default: stdout)");
  add_fit_flags(bench);

  // reconstruct
  auto* recon = app.add_subcommand("reconstruct", "NME curve reconstruction for selected curves");
  recon->add_option("--data", data_path, "dataset CSV")->required();
  recon->add_option("--meta", meta_path, "sidecar (default: <data>.meta)");
  recon->add_option("--curves", curves_csv, "comma list of 0-based curve indices")->required();
  recon->add_option("--out", out_path, "output CSV path")->required();
  add_fit_flags(recon);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed())
      return run_simulate(out_path, scenario, n, a1, a2, seed, grid_points, noise_sd_obs,
                          noise_sd_model);
    if (fit->parsed())
      return run_fit(data_path, meta_path, method_str, collect_options(), out_path,
                     dump_eigen_path);
    if (bench->parsed())
      return run_benchmark(scenario, methods_csv, reps, fast, seed, n_csv, a1, a2_csv,
                           collect_options(), out_path, fve);
    if (recon->parsed())
      return run_reconstruct(data_path, meta_path, curves_csv, collect_options(), out_path);
  } catch (const fraglm::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
