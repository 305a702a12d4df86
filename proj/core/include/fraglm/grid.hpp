#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "fraglm/errors.hpp"

namespace fraglm {

// Equally spaced evaluation grid on [t_min, t_max] with trapezoid quadrature
// weights (h/2 at the ends, h inside). All curve values and surfaces in this
// library live on such a grid.
struct GridDomain {
  double t_min = 0.0;
  double t_max = 1.0;
  Eigen::VectorXd points;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return points.size(); }
  double length() const { return t_max - t_min; }
  double spacing() const { return (t_max - t_min) / static_cast<double>(points.size() - 1); }

  bool same_as(const GridDomain& other) const {
    return t_min == other.t_min && t_max == other.t_max && points.size() == other.points.size();
  }
};

GridDomain make_grid(double t_min, double t_max, Eigen::Index n_points);

// Boolean observation flags, one per grid point; true marks a point inside
// the observed set O_i. At least one flag must be true.
class ObservationMask {
 public:
  explicit ObservationMask(std::vector<std::uint8_t> flags);

  static ObservationMask full(Eigen::Index n) {
    return ObservationMask(std::vector<std::uint8_t>(static_cast<std::size_t>(n), 1));
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(flags_.size()); }
  bool operator[](Eigen::Index k) const { return flags_[static_cast<std::size_t>(k)] != 0; }
  bool is_full() const;
  Eigen::Index count() const;
  ObservationMask complement() const;

  // Maximal contiguous runs of true flags as inclusive [first, last] index pairs.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> runs() const;

  const std::vector<std::uint8_t>& flags() const { return flags_; }

 private:
  std::vector<std::uint8_t> flags_;
};

// Curve samples on the grid plus the mask; entries under false flags are
// sentinels (NaN from files) and must never be read.
struct ObservedCurve {
  Eigen::VectorXd values;
  ObservationMask mask;

  double value_at(Eigen::Index k) const {
    if (!mask[k]) raise(errc::invalid_argument, "value_at: grid point " + std::to_string(k) + " is not observed");
    return values[k];
  }
};

struct FunctionalDataset {
  GridDomain grid;
  std::vector<ObservedCurve> curves;
  Eigen::VectorXd responses;
  bool noisy = false;

  Eigen::Index n() const { return static_cast<Eigen::Index>(curves.size()); }
  void validate() const;
};

double inner_product(const Eigen::VectorXd& f, const Eigen::VectorXd& g, const GridDomain& grid);

// Trapezoid quadrature applied independently over each maximal contiguous
// observed run; a single-point run carries zero mass.
double masked_inner_product(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                            const ObservationMask& mask, const GridDomain& grid);

// Per-point quadrature weights of the masked integral above (zero off-mask).
Eigen::VectorXd fragment_weights(const ObservationMask& mask, const GridDomain& grid);

}  // namespace fraglm
