#include "epg/env/bandit.hpp"

#include <limits>

namespace epg {

BoundedBandit BoundedBandit::quadratic(const Vector& peak) {
  BoundedBandit b;
  b.dim_a = static_cast<int>(peak.size());
  b.peak = peak;
  b.reward_fn = [peak](const Vector& a) { return -(a - peak).squaredNorm(); };
  return b;
}

double BoundedBandit::reward(const Vector& a) const {
  if (a.size() != dim_a) throw ConfigError("BoundedBandit: action dimension mismatch");
  if ((a.array() < 0.0).any() || (a.array() > 1.0).any()) throw DomainError("BoundedBandit: action outside [0,1]^d");
  return reward_fn(a);
}

std::pair<Vector, double> BoundedBandit::grid_optimum(int resolution) const {
  std::vector<int> idx(dim_a, 0);
  Vector a(dim_a);
  Vector best(dim_a);
  double best_r = -std::numeric_limits<double>::infinity();
  while (true) {
    for (int i = 0; i < dim_a; ++i) a(i) = static_cast<double>(idx[i]) / resolution;
    const double r = reward_fn(a);
    if (r > best_r) {
      best_r = r;
      best = a;
    }
    int k = 0;
    while (k < dim_a && ++idx[k] > resolution) idx[k++] = 0;
    if (k == dim_a) break;
  }
  return {best, best_r};
}

}  // namespace epg
