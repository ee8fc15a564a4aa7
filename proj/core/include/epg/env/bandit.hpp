#pragma once

#include <functional>
#include <optional>

#include "epg/types.hpp"

namespace epg {

// One-step environment with actions in [0, 1]^dim_a.
struct BoundedBandit {
  int dim_a = 1;
  std::function<double(const Vector&)> reward_fn;
  // Set when built by quadratic(); used for serialisation.
  std::optional<Vector> peak;

  // r(a) = -|a - peak|^2. A peak outside the box puts the optimum on the
  // boundary.
  static BoundedBandit quadratic(const Vector& peak);

  // Throws DomainError outside [0, 1]^dim_a.
  double reward(const Vector& a) const;
  // Best action and reward on a uniform grid (per-dimension resolution).
  std::pair<Vector, double> grid_optimum(int resolution) const;
};

}  // namespace epg
