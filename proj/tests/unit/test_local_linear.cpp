#include <doctest.h>

#include <cmath>

#include "fraglm/local_linear.hpp"
#include "fraglm/rng.hpp"

using namespace fraglm;

TEST_CASE("binning collapses repeated locations") {
  const BinnedPoints1D pts = bin_points({0.5, 0.1, 0.5, 0.1, 0.9}, {1, 2, 3, 4, 5});
  REQUIRE(pts.x.size() == 3);
  CHECK(pts.x[0] == 0.1);
  CHECK(pts.count[0] == 2);
  CHECK(pts.sum[0] == 6);
  CHECK(pts.x[2] == 0.9);
  CHECK(pts.count[2] == 1);

  const BinnedPoints2D cells = bin_points({0., 0., 1.}, {1., 1., 0.}, {2., 4., 8.});
  REQUIRE(cells.x1.size() == 2);
  CHECK(cells.count[0] == 2);
  CHECK(cells.sum[0] == 6);
}

TEST_CASE("1-D local linear reproduces affine data exactly") {
  CounterRng rng(CounterRng::derive_key(401, 0, 0));
  const KernelSpec kernel{};
  for (int rep = 0; rep < 1000; ++rep) {
    const int npts = 5 + static_cast<int>(rng.next_u64() % 30);
    const double b0 = rng.next_gaussian(), b1 = rng.next_gaussian();
    std::vector<double> x(npts), y(npts);
    for (int i = 0; i < npts; ++i) {
      x[i] = rng.next_uniform();
      y[i] = b0 + b1 * x[i];
    }
    const BinnedPoints1D pts = bin_points(std::move(x), std::move(y));
    const double t = rng.next_uniform();
    const double h = 0.3 + rng.next_uniform();
    const double fit = local_linear_eval(pts, kernel, h, t);
    CHECK(std::abs(fit - (b0 + b1 * t)) < 1e-8 * (1 + std::abs(b0) + std::abs(b1)));
  }
}

TEST_CASE("2-D local linear reproduces planes exactly") {
  CounterRng rng(CounterRng::derive_key(402, 0, 0));
  const KernelSpec kernel{};
  for (int rep = 0; rep < 500; ++rep) {
    const int npts = 12 + static_cast<int>(rng.next_u64() % 40);
    const double b0 = rng.next_gaussian(), b1 = rng.next_gaussian(), b2 = rng.next_gaussian();
    std::vector<double> x1(npts), x2(npts), y(npts);
    for (int i = 0; i < npts; ++i) {
      x1[i] = rng.next_uniform();
      x2[i] = rng.next_uniform();
      y[i] = b0 + b1 * x1[i] + b2 * x2[i];
    }
    const BinnedPoints2D cells = bin_points(std::move(x1), std::move(x2), std::move(y));
    const double t1 = rng.next_uniform(), t2 = rng.next_uniform();
    const double h = 0.5 + rng.next_uniform();
    const double fit = local_linear_eval(cells, kernel, h, t1, t2);
    CHECK(std::abs(fit - (b0 + b1 * t1 + b2 * t2)) <
          1e-8 * (1 + std::abs(b0) + std::abs(b1) + std::abs(b2)));
  }
}

TEST_CASE("2-D local linear is exact for bilinear data at symmetric interior windows") {
  const KernelSpec kernel{};
  // full symmetric lattice of cells around the evaluation point
  std::vector<double> x1, x2, y;
  const double s0 = 0.5, t0 = 0.3;
  for (int a = -3; a <= 3; ++a) {
    for (int b = -3; b <= 3; ++b) {
      const double s = s0 + 0.02 * a, t = t0 + 0.02 * b;
      x1.push_back(s);
      x2.push_back(t);
      y.push_back(1.0 + 2.0 * s - t + 4.0 * s * t);
    }
  }
  const BinnedPoints2D cells = bin_points(std::move(x1), std::move(x2), std::move(y));
  const double fit = local_linear_eval(cells, kernel, 0.05, s0, t0);
  CHECK(std::abs(fit - (1.0 + 2.0 * s0 - t0 + 4.0 * s0 * t0)) < 1e-8);
}

TEST_CASE("degenerate windows widen and eventually fail") {
  const KernelSpec kernel{};
  // all mass at one location: no slope identifiable at any widening
  const BinnedPoints1D one = bin_points({0.5, 0.5, 0.5}, {1., 1., 1.});
  CHECK_THROWS_AS(local_linear_eval(one, kernel, 0.1, 0.5), error);

  // two locations, but only one inside the initial window; widening rescues it
  const BinnedPoints1D two = bin_points({0.0, 1.0}, {3., 5.});
  const double fit = local_linear_eval(two, kernel, 0.3, 0.0);
  CHECK(fit == doctest::Approx(3.0).epsilon(1e-10));
}
