#include <doctest.h>

#include <cmath>

#include "fraglm/covariance.hpp"
#include "fraglm/rng.hpp"

using namespace fraglm;

namespace {

// scenario-1 eigenstructure: the analytic rank-2 covariance
struct Rank2 {
  GridDomain grid;
  Eigen::VectorXd phi1, phi2;
  double lambda1, lambda2;
  Eigen::MatrixXd surface;
};

Rank2 make_rank2(Eigen::Index p) {
  Rank2 r;
  r.grid = make_grid(0, 1, p);
  r.phi1.resize(p);
  r.phi2.resize(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    r.phi1[k] = std::sqrt(2.0) * std::sin(M_PI * r.grid.points[k] / 2);
    r.phi2[k] = std::sqrt(2.0) * std::sin(3 * M_PI * r.grid.points[k] / 2);
  }
  r.lambda1 = std::pow(M_PI / 2, -2.0);
  r.lambda2 = std::pow(3 * M_PI / 2, -2.0);
  r.surface = r.lambda1 * r.phi1 * r.phi1.transpose() + r.lambda2 * r.phi2 * r.phi2.transpose();
  return r;
}

double l2_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const GridDomain& g) {
  const Eigen::VectorXd d = a - b;
  return std::sqrt(inner_product(d, d, g));
}

}  // namespace

TEST_CASE("eigendecompose recovers the rank-2 analytic eigenpairs") {
  const Rank2 r = make_rank2(101);
  const EigenSystem sys = eigendecompose(CovarianceSurface(r.grid, r.surface), r.grid.size());
  REQUIRE(sys.count() == 2);
  CHECK(std::abs(sys.eigenvalues[0] - r.lambda1) / r.lambda1 < 1e-3);
  CHECK(std::abs(sys.eigenvalues[1] - r.lambda2) / r.lambda2 < 1e-3);
  CHECK(l2_distance(sys.eigenfunctions.col(0), r.phi1, r.grid) < 1e-2);
  CHECK(l2_distance(sys.eigenfunctions.col(1), r.phi2, r.grid) < 1e-2);
}

TEST_CASE("eigendecompose of the zero surface retains nothing") {
  const GridDomain g = make_grid(0, 1, 21);
  const EigenSystem sys = eigendecompose(CovarianceSurface(g, Eigen::MatrixXd::Zero(21, 21)), 21);
  CHECK(sys.count() == 0);
}

TEST_CASE("eigendecompose of the constant surface is the rank-one analytic pair") {
  const GridDomain g = make_grid(0, 1, 41);
  const EigenSystem sys =
      eigendecompose(CovarianceSurface(g, Eigen::MatrixXd::Ones(41, 41)), g.size());
  REQUIRE(sys.count() == 1);
  CHECK(sys.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-10));
  for (Eigen::Index k = 0; k < g.size(); ++k)
    CHECK(sys.eigenfunctions(k, 0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("eigendecompose rejects non-finite surfaces") {
  const GridDomain g = make_grid(0, 1, 5);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(5, 5);
  bad(2, 3) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(CovarianceSurface(g, bad), error);
}

TEST_CASE("eigenfunctions are quadrature-orthonormal with deterministic signs") {
  CounterRng rng(CounterRng::derive_key(201, 0, 0));
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index p = 5 + static_cast<Eigen::Index>(rng.next_u64() % 20);
    const GridDomain g = make_grid(0, 1, p);
    Eigen::MatrixXd a(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < p; ++j) a(i, j) = rng.next_gaussian();
    const EigenSystem sys = eigendecompose(CovarianceSurface(g, a * a.transpose()), p);
    for (Eigen::Index i = 0; i < sys.count(); ++i) {
      for (Eigen::Index j = i; j < sys.count(); ++j) {
        const double ip = inner_product(sys.eigenfunctions.col(i), sys.eigenfunctions.col(j), g);
        CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-8);
      }
      double integral = 0;
      for (Eigen::Index k = 0; k < p; ++k) integral += g.weights[k] * sys.eigenfunctions(k, i);
      if (std::abs(integral) > 1e-10)
        CHECK(integral > 0);
      else
        CHECK(sys.eigenfunctions(0, i) >= 0);
    }
    // descending positive spectrum
    for (std::size_t j = 1; j < sys.eigenvalues.size(); ++j)
      CHECK(sys.eigenvalues[j] <= sys.eigenvalues[j - 1]);
    if (!sys.eigenvalues.empty()) CHECK(sys.eigenvalues.back() > 0);
  }
}

TEST_CASE("spectral reconstruction reproduces low-rank surfaces") {
  const Rank2 r = make_rank2(61);
  const EigenSystem sys = eigendecompose(CovarianceSurface(r.grid, r.surface), r.grid.size());
  Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(r.grid.size(), r.grid.size());
  for (Eigen::Index j = 0; j < sys.count(); ++j)
    rebuilt += sys.eigenvalues[static_cast<std::size_t>(j)] * sys.eigenfunctions.col(j) *
               sys.eigenfunctions.col(j).transpose();
  CHECK((rebuilt - r.surface).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("select_m_fve picks the smallest sufficient truncation") {
  CHECK(select_m_fve({4, 3, 2, 1}, 0.69) == 2);
  CHECK(select_m_fve({1}, 0.5) == 1);
  CHECK(select_m_fve({1}, 0.999) == 1);
  const double l1 = std::pow(M_PI / 2, -2.0), l2 = std::pow(3 * M_PI / 2, -2.0);
  CHECK(select_m_fve({l1, l2}, 0.95) == 2);  // l1 share is 0.9 < 0.95
  CHECK_THROWS_AS(select_m_fve({0, 0, 0}, 0.9), error);
  CHECK_THROWS_AS(select_m_fve({1, 1}, 1.5), error);
}
