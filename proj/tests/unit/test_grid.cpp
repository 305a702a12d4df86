#include <doctest.h>

#include <cmath>

#include "fraglm/grid.hpp"
#include "fraglm/rng.hpp"

using namespace fraglm;

namespace {

Eigen::VectorXd eval_on_grid(const GridDomain& grid, double (*f)(double)) {
  Eigen::VectorXd v(grid.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k) v[k] = f(grid.points[k]);
  return v;
}

ObservationMask interval_mask(const GridDomain& grid, double lo, double hi) {
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(grid.size()));
  for (Eigen::Index k = 0; k < grid.size(); ++k)
    flags[static_cast<std::size_t>(k)] = (grid.points[k] >= lo && grid.points[k] <= hi) ? 1 : 0;
  return ObservationMask(flags);
}

}  // namespace

TEST_CASE("make_grid basic shapes") {
  const GridDomain two = make_grid(0, 1, 2);
  CHECK(two.points[0] == 0.0);
  CHECK(two.points[1] == 1.0);
  CHECK(two.weights[0] == 0.5);
  CHECK(two.weights[1] == 0.5);

  const GridDomain thirty = make_grid(0, 1, 30);
  CHECK(thirty.size() == 30);
  CHECK(thirty.spacing() == doctest::Approx(1.0 / 29).epsilon(1e-14));
  CHECK(thirty.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));

  const GridDomain five = make_grid(0, 2, 5);
  for (int k = 0; k < 5; ++k)
    CHECK(five.weights[k] == doctest::Approx(k == 0 || k == 4 ? 0.25 : 0.5).epsilon(1e-15));
}

TEST_CASE("make_grid rejects bad arguments") {
  CHECK_THROWS_AS(make_grid(0, 1, 1), error);
  CHECK_THROWS_AS(make_grid(1, 1, 10), error);
  CHECK_THROWS_AS(make_grid(2, 1, 10), error);
}

TEST_CASE("inner_product matches closed forms") {
  const GridDomain g = make_grid(0, 1, 201);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.size());
  CHECK(inner_product(ones, ones, g) == doctest::Approx(1.0).epsilon(1e-13));

  const auto phi1 = eval_on_grid(g, +[](double t) { return std::sqrt(2.0) * std::sin(M_PI * t / 2); });
  const auto phi2 = eval_on_grid(g, +[](double t) { return std::sqrt(2.0) * std::sin(3 * M_PI * t / 2); });
  CHECK(inner_product(phi1, phi1, g) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(std::abs(inner_product(phi1, phi2, g)) < 1e-4);

  CHECK_THROWS_AS(inner_product(ones, Eigen::VectorXd::Ones(5), g), error);
}

TEST_CASE("quadrature is exact on products of joint degree <= 1") {
  CounterRng rng(CounterRng::derive_key(101, 0, 0));
  for (int rep = 0; rep < 1000; ++rep) {
    const int p = 2 + static_cast<int>(rng.next_u64() % 40);
    const double a = rng.next_uniform() * 4 - 2;
    const double b = a + 0.5 + rng.next_uniform() * 3;
    const GridDomain g = make_grid(a, b, p);
    const double c0 = rng.next_uniform() * 4 - 2, c1 = rng.next_uniform() * 4 - 2;
    const double d0 = rng.next_uniform() * 4 - 2;
    // f linear, g constant: the product stays degree <= 1
    Eigen::VectorXd f(p), h(p);
    for (int k = 0; k < p; ++k) {
      f[k] = c0 + c1 * g.points[k];
      h[k] = d0;
    }
    const double exact =
        d0 * (c0 * (b - a) + c1 * (b * b - a * a) / 2);
    CHECK(inner_product(f, h, g) == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("inner_product is bilinear") {
  const GridDomain g = make_grid(0, 1, 37);
  CounterRng rng(CounterRng::derive_key(102, 0, 0));
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd f(g.size()), h(g.size()), q(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) {
      f[k] = rng.next_gaussian();
      h[k] = rng.next_gaussian();
      q[k] = rng.next_gaussian();
    }
    const double a = rng.next_gaussian(), b = rng.next_gaussian();
    const double lhs = inner_product(a * f + b * h, q, g);
    const double rhs = a * inner_product(f, q, g) + b * inner_product(h, q, g);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("masked_inner_product reduces to inner_product bit-for-bit on full masks") {
  const GridDomain g = make_grid(0, 1, 30);
  CounterRng rng(CounterRng::derive_key(103, 0, 0));
  Eigen::VectorXd f(g.size()), h(g.size());
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    f[k] = rng.next_gaussian();
    h[k] = rng.next_gaussian();
  }
  const auto full = ObservationMask::full(g.size());
  CHECK(masked_inner_product(f, h, full, g) == inner_product(f, h, g));
}

TEST_CASE("masked_inner_product integrates fragments") {
  const GridDomain g = make_grid(0, 1, 101);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.size());

  const auto half = interval_mask(g, 0.0, 0.5);
  CHECK(masked_inner_product(ones, ones, half, g) == doctest::Approx(0.5).epsilon(g.spacing()));

  // union of two fragments: total observed length 0.5
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(g.size()), 0);
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const double t = g.points[k];
    if (t <= 0.25 || t >= 0.75) flags[static_cast<std::size_t>(k)] = 1;
  }
  const ObservationMask split{flags};
  CHECK(masked_inner_product(ones, ones, split, g) == doctest::Approx(0.5).epsilon(g.spacing()));
}

TEST_CASE("all-false masks are rejected at construction") {
  CHECK_THROWS_AS(ObservationMask(std::vector<std::uint8_t>(8, 0)), error);
  CHECK_THROWS_AS(ObservationMask({}), error);
}

TEST_CASE("mask additivity up to boundary half-weights") {
  const GridDomain g = make_grid(0, 1, 41);
  CounterRng rng(CounterRng::derive_key(104, 0, 0));
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd f(g.size()), h(g.size());
    double max_fg = 0;
    for (Eigen::Index k = 0; k < g.size(); ++k) {
      f[k] = rng.next_gaussian();
      h[k] = rng.next_gaussian();
      max_fg = std::max(max_fg, std::abs(f[k] * h[k]));
    }
    // split point strictly inside so both parts are nonempty
    const Eigen::Index cut = 1 + static_cast<Eigen::Index>(rng.next_u64() % (g.size() - 2));
    std::vector<std::uint8_t> flags(static_cast<std::size_t>(g.size()), 0);
    for (Eigen::Index k = 0; k < cut; ++k) flags[static_cast<std::size_t>(k)] = 1;
    const ObservationMask left{flags};
    const ObservationMask right = left.complement();
    const double sum = masked_inner_product(f, h, left, g) + masked_inner_product(f, h, right, g);
    const double whole = inner_product(f, h, g);
    CHECK(std::abs(sum - whole) <= 2 * g.spacing() * max_fg + 1e-14);
  }
}

TEST_CASE("value_at enforces the mask") {
  const GridDomain g = make_grid(0, 1, 5);
  std::vector<std::uint8_t> flags{1, 1, 0, 1, 1};
  ObservedCurve curve{Eigen::VectorXd::Ones(5), ObservationMask(flags)};
  CHECK(curve.value_at(0) == 1.0);
  CHECK_THROWS_AS(curve.value_at(2), error);
}

TEST_CASE("fragment_weights of a full mask equals the grid weights") {
  const GridDomain g = make_grid(0, 2, 17);
  const Eigen::VectorXd w = fragment_weights(ObservationMask::full(g.size()), g);
  for (Eigen::Index k = 0; k < g.size(); ++k) CHECK(w[k] == g.weights[k]);
}

TEST_CASE("single-point fragments carry zero quadrature mass") {
  const GridDomain g = make_grid(0, 1, 9);
  std::vector<std::uint8_t> flags{0, 0, 1, 0, 0, 0, 1, 1, 0};
  const Eigen::VectorXd w = fragment_weights(ObservationMask(flags), g);
  CHECK(w[2] == 0.0);                    // singleton run
  CHECK(w[6] == doctest::Approx(g.spacing() / 2));
  CHECK(w[7] == doctest::Approx(g.spacing() / 2));
}
