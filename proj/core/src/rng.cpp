#include "fraglm/rng.hpp"

#include <cmath>

namespace fraglm {

double CounterRng::next_gaussian() {
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1 in [0,1) keeps the log finite
  return r * std::cos(2.0 * M_PI * u2);
}

double CounterRng::next_uniform_sym3() {
  return (2.0 * next_uniform() - 1.0) * 1.7320508075688772;
}

}  // namespace fraglm
