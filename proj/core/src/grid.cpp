#include "fraglm/grid.hpp"

#include <cmath>

namespace fraglm {

GridDomain make_grid(double t_min, double t_max, Eigen::Index n_points) {
  if (n_points < 2) raise(errc::invalid_argument, "make_grid: need at least 2 points");
  if (!(t_min < t_max)) raise(errc::invalid_argument, "make_grid: t_min must be < t_max");

  GridDomain g;
  g.t_min = t_min;
  g.t_max = t_max;
  g.points.resize(n_points);
  g.weights.resize(n_points);
  const double h = (t_max - t_min) / static_cast<double>(n_points - 1);
  for (Eigen::Index k = 0; k < n_points; ++k) {
    g.points[k] = t_min + h * static_cast<double>(k);
  }
  g.points[n_points - 1] = t_max;  // exact right endpoint
  g.weights.setConstant(h);
  g.weights[0] = h / 2;
  g.weights[n_points - 1] = h / 2;
  return g;
}

ObservationMask::ObservationMask(std::vector<std::uint8_t> flags) : flags_(std::move(flags)) {
  bool any = false;
  for (auto f : flags_) any = any || (f != 0);
  if (flags_.empty() || !any) raise(errc::empty_support, "ObservationMask: no observed grid points");
}

bool ObservationMask::is_full() const {
  for (auto f : flags_)
    if (f == 0) return false;
  return true;
}

Eigen::Index ObservationMask::count() const {
  Eigen::Index c = 0;
  for (auto f : flags_) c += (f != 0);
  return c;
}

ObservationMask ObservationMask::complement() const {
  std::vector<std::uint8_t> inv(flags_.size());
  for (std::size_t k = 0; k < flags_.size(); ++k) inv[k] = flags_[k] ? 0 : 1;
  return ObservationMask(std::move(inv));
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> ObservationMask::runs() const {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  const Eigen::Index n = size();
  Eigen::Index k = 0;
  while (k < n) {
    if (!(*this)[k]) {
      ++k;
      continue;
    }
    Eigen::Index last = k;
    while (last + 1 < n && (*this)[last + 1]) ++last;
    out.emplace_back(k, last);
    k = last + 1;
  }
  return out;
}

void FunctionalDataset::validate() const {
  const Eigen::Index p = grid.size();
  if (n() < 2) raise(errc::invalid_argument, "dataset: need at least 2 curves");
  if (responses.size() != n()) raise(errc::invalid_argument, "dataset: responses/curves length mismatch");
  for (const auto& c : curves) {
    if (c.values.size() != p || c.mask.size() != p)
      raise(errc::invalid_argument, "dataset: curve length does not match grid");
  }
}

double inner_product(const Eigen::VectorXd& f, const Eigen::VectorXd& g, const GridDomain& grid) {
  if (f.size() != grid.size() || g.size() != grid.size())
    raise(errc::invalid_argument, "inner_product: length mismatch with grid");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < grid.size(); ++k) acc += grid.weights[k] * f[k] * g[k];
  return acc;
}

Eigen::VectorXd fragment_weights(const ObservationMask& mask, const GridDomain& grid) {
  if (mask.size() != grid.size()) raise(errc::invalid_argument, "fragment_weights: mask/grid length mismatch");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(grid.size());
  const double h = grid.spacing();
  for (const auto& [first, last] : mask.runs()) {
    if (first == last) continue;  // zero-length fragment, zero mass
    w[first] = h / 2;
    w[last] = h / 2;
    for (Eigen::Index k = first + 1; k < last; ++k) w[k] = h;
  }
  return w;
}

double masked_inner_product(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                            const ObservationMask& mask, const GridDomain& grid) {
  if (f.size() != grid.size() || g.size() != grid.size() || mask.size() != grid.size())
    raise(errc::invalid_argument, "masked_inner_product: length mismatch");
  if (mask.is_full()) return inner_product(f, g, grid);  // bit-for-bit reduction

  const double h = grid.spacing();
  double acc = 0.0;
  for (const auto& [first, last] : mask.runs()) {
    if (first == last) continue;
    acc += (h / 2) * f[first] * g[first];
    for (Eigen::Index k = first + 1; k < last; ++k) acc += h * f[k] * g[k];
    acc += (h / 2) * f[last] * g[last];
  }
  return acc;
}

}  // namespace fraglm
