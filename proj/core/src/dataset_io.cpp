#include "fraglm/dataset_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace fraglm {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(errc::invalid_argument, "cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::invalid_argument, "cannot open '" + path + "' for reading");
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  std::size_t b = s.find_last_not_of(" \t");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

void write_dataset_csv(const std::string& path, const FunctionalDataset& dataset) {
  dataset.validate();
  std::ofstream out = open_out(path);
  const Eigen::Index p = dataset.grid.size();
  for (Eigen::Index k = 0; k < p; ++k) out << "t_" << (k + 1) << ",";
  out << "Y\n";
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    const auto& curve = dataset.curves[i];
    for (Eigen::Index k = 0; k < p; ++k) {
      if (curve.mask[k])
        out << format_double(curve.values[k]);
      else
        out << "NaN";
      out << ",";
    }
    out << format_double(dataset.responses[i]) << "\n";
  }
}

FunctionalDataset read_dataset_csv(const std::string& path, const GridDomain& grid, bool noisy) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) raise(errc::invalid_argument, "dataset csv '" + path + "' is empty");
  const auto header = split_csv(line);
  const auto p = static_cast<Eigen::Index>(header.size()) - 1;
  if (p < 2 || trim(header.back()) != "Y")
    raise(errc::invalid_argument, "dataset csv: header must be t_1,...,t_p,Y");
  if (p != grid.size())
    raise(errc::invalid_argument, "dataset csv: " + std::to_string(p) +
                                      " grid columns but the grid has " +
                                      std::to_string(grid.size()) + " points");

  FunctionalDataset dataset;
  dataset.grid = grid;
  dataset.noisy = noisy;
  std::vector<double> responses;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (static_cast<Eigen::Index>(fields.size()) != p + 1)
      raise(errc::invalid_argument,
            "dataset csv line " + std::to_string(lineno) + ": expected " + std::to_string(p + 1) +
                " fields, got " + std::to_string(fields.size()));
    Eigen::VectorXd values(p);
    std::vector<std::uint8_t> flags(static_cast<std::size_t>(p));
    for (Eigen::Index k = 0; k < p; ++k) {
      const std::string f = trim(fields[static_cast<std::size_t>(k)]);
      if (f == "NaN" || f == "nan" || f == "NA") {
        values[k] = std::numeric_limits<double>::quiet_NaN();
        flags[static_cast<std::size_t>(k)] = 0;
      } else {
        std::size_t used = 0;
        values[k] = std::stod(f, &used);
        flags[static_cast<std::size_t>(k)] = 1;
      }
    }
    responses.push_back(std::stod(trim(fields.back())));
    dataset.curves.push_back(ObservedCurve{std::move(values), ObservationMask(std::move(flags))});
  }
  dataset.responses = Eigen::Map<const Eigen::VectorXd>(responses.data(),
                                                        static_cast<Eigen::Index>(responses.size()));
  dataset.validate();
  return dataset;
}

std::map<std::string, std::string> read_kv_file(const std::string& path) {
  std::ifstream in = open_in(path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      raise(errc::configuration, "config '" + path + "': expected key = value, got '" + s + "'");
    kv[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
  }
  return kv;
}

void write_meta(const std::string& path, const ScenarioConfig& config) {
  std::ofstream out = open_out(path);
  out << "scenario = " << (config.scenario == Scenario::noiseless_rank2 ? 1 : 2) << "\n";
  out << "n = " << config.n << "\n";
  out << "grid_points = " << config.grid_points << "\n";
  out << "t_min = 0\n";
  out << "t_max = 1\n";
  out << "a1 = " << format_double(config.a1) << "\n";
  out << "a2 = " << format_double(config.a2) << "\n";
  out << "noise_sd_obs = " << format_double(config.noise_sd_obs) << "\n";
  out << "noise_sd_model = " << format_double(config.noise_sd_model) << "\n";
  out << "seed = " << config.seed << "\n";
  out << "replications = " << config.replications << "\n";
}

ScenarioConfig meta_to_config(const std::map<std::string, std::string>& kv) {
  const auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) raise(errc::configuration, std::string("meta: missing key '") + key + "'");
    return it->second;
  };
  ScenarioConfig config =
      ScenarioConfig::defaults(std::stoi(get("scenario")) == 1 ? Scenario::noiseless_rank2
                                                               : Scenario::noisy_50term);
  config.n = std::stol(get("n"));
  config.grid_points = std::stol(get("grid_points"));
  config.a1 = std::stod(get("a1"));
  config.a2 = std::stod(get("a2"));
  if (kv.count("noise_sd_obs")) config.noise_sd_obs = std::stod(kv.at("noise_sd_obs"));
  if (kv.count("noise_sd_model")) config.noise_sd_model = std::stod(kv.at("noise_sd_model"));
  if (kv.count("seed")) config.seed = std::stoull(kv.at("seed"));
  if (kv.count("replications")) config.replications = std::stol(kv.at("replications"));
  return config;
}

void write_truth_csv(const std::string& path, const GridDomain& grid, const TruthBundle& truth) {
  std::ofstream out = open_out(path);
  out << "t,gamma_true\n";
  for (Eigen::Index k = 0; k < grid.size(); ++k)
    out << format_double(grid.points[k]) << "," << format_double(truth.gamma_true[k]) << "\n";
}

void write_eigen_csv(const std::string& path, const EigenSystem& system) {
  std::ofstream out = open_out(path);
  out << "t,mean";
  for (Eigen::Index j = 0; j < system.count(); ++j)
    out << ",phi_" << (j + 1) << "=" << format_double(system.eigenvalues[static_cast<std::size_t>(j)]);
  out << "\n";
  for (Eigen::Index k = 0; k < system.grid.size(); ++k) {
    out << format_double(system.grid.points[k]) << "," << format_double(system.mean[k]);
    for (Eigen::Index j = 0; j < system.count(); ++j)
      out << "," << format_double(system.eigenfunctions(k, j));
    out << "\n";
  }
}

}  // namespace fraglm
