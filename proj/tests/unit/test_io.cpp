#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fraglm/dataset_io.hpp"
#include "fraglm/rng.hpp"
#include "fraglm/simulate.hpp"

using namespace fraglm;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("fraglm_test_" + std::to_string(CounterRng(reinterpret_cast<std::uintptr_t>(this)).next_u64()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("dataset csv round trip is bit-exact on observed entries") {
  TempDir tmp;
  ScenarioConfig config = ScenarioConfig::defaults(Scenario::noisy_50term);
  config.n = 17;
  config.a2 = 0.4;
  config.seed = 121;
  const SimulatedData sim = gen_scenario2(config, 0);

  const std::string path = tmp.file("d.csv");
  write_dataset_csv(path, sim.dataset);
  const FunctionalDataset loaded = read_dataset_csv(path, sim.dataset.grid, true);

  REQUIRE(loaded.n() == sim.dataset.n());
  CHECK(loaded.noisy);
  for (Eigen::Index i = 0; i < loaded.n(); ++i) {
    CHECK(loaded.responses[i] == sim.dataset.responses[i]);
    for (Eigen::Index k = 0; k < 30; ++k) {
      REQUIRE(loaded.curves[i].mask[k] == sim.dataset.curves[i].mask[k]);
      if (loaded.curves[i].mask[k])
        CHECK(loaded.curves[i].values[k] == sim.dataset.curves[i].values[k]);
      else
        CHECK(std::isnan(loaded.curves[i].values[k]));
    }
  }
}

TEST_CASE("meta sidecar round trip") {
  TempDir tmp;
  ScenarioConfig config = ScenarioConfig::defaults(Scenario::noisy_50term);
  config.n = 33;
  config.a1 = 1.25;
  config.a2 = 0.375;
  config.seed = 9876543210123ULL;
  const std::string path = tmp.file("d.meta");
  write_meta(path, config);
  const ScenarioConfig back = meta_to_config(read_kv_file(path));
  CHECK(back.scenario == Scenario::noisy_50term);
  CHECK(back.n == 33);
  CHECK(back.a1 == 1.25);
  CHECK(back.a2 == 0.375);
  CHECK(back.seed == config.seed);
  CHECK(back.noise_sd_model == 0.5);
}

TEST_CASE("kv parser accepts comments and rejects malformed lines") {
  TempDir tmp;
  {
    std::ofstream out(tmp.file("ok.cfg"));
    out << "# comment\n\n  fve_threshold = 0.9 \nrho = 0.01\n";
  }
  const auto kv = read_kv_file(tmp.file("ok.cfg"));
  CHECK(kv.at("fve_threshold") == "0.9");
  CHECK(kv.at("rho") == "0.01");

  {
    std::ofstream out(tmp.file("bad.cfg"));
    out << "this is not a pair\n";
  }
  CHECK_THROWS_AS(read_kv_file(tmp.file("bad.cfg")), error);
  CHECK_THROWS_AS(read_kv_file(tmp.file("missing.cfg")), error);
}

TEST_CASE("csv reader validates the header against the grid") {
  TempDir tmp;
  {
    std::ofstream out(tmp.file("bad.csv"));
    out << "t_1,t_2,Y\n1,2,3\n0,0,0\n";
  }
  CHECK_THROWS_AS(read_dataset_csv(tmp.file("bad.csv"), make_grid(0, 1, 5), false), error);
  const FunctionalDataset ok = read_dataset_csv(tmp.file("bad.csv"), make_grid(0, 1, 2), false);
  CHECK(ok.n() == 2);
}

TEST_CASE("eigensystem csv carries eigenvalues in the header") {
  TempDir tmp;
  EigenSystem sys;
  sys.grid = make_grid(0, 1, 3);
  sys.mean = Eigen::VectorXd::Zero(3);
  sys.eigenvalues = {0.5, 0.125};
  sys.eigenfunctions = Eigen::MatrixXd::Identity(3, 2);
  const std::string path = tmp.file("eig.csv");
  write_eigen_csv(path, sys);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.find("phi_1=0.5") != std::string::npos);
  CHECK(header.find("phi_2=0.125") != std::string::npos);
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}
