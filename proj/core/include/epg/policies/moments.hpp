#pragma once

#include <map>
#include <string>

#include "epg/polynomial.hpp"

namespace epg {

// Highest total degree for which multivariate Gaussian cross-moments are
// computed. One-dimensional Gaussians have no limit.
inline constexpr int kMaxMultivariateMomentDegree = 6;

// Uncentred cross-moments E[prod_j a_j^p_j] for all |p| <= degree_bound.
class MomentVector {
 public:
  MomentVector(int dim, int degree_bound);

  int dim() const { return dim_; }
  int degree_bound() const { return degree_bound_; }

  double at(const MultiIndex& p) const;
  void set(const MultiIndex& p, double value);
  const std::map<MultiIndex, double, GradedLex>& values() const { return values_; }

  // E[q(a)] = sum_p q_p m_p
  double expect(const PolyCoeffs& q) const;

  // Non-empty when a numeric fallback could not certify its accuracy budget.
  std::string warning;
  // Estimated absolute error of the fallback, 0 for exact paths.
  double error_estimate = 0.0;

 private:
  int dim_;
  int degree_bound_;
  std::map<MultiIndex, double, GradedLex> values_;
};

MomentVector gaussian_moments(const Vector& mu, const Matrix& cov, int degree_bound);

}  // namespace epg
