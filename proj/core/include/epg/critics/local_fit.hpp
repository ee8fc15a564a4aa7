#pragma once

#include "epg/critics/critic.hpp"

namespace epg {

struct FitConfig {
  int n_samples = 100;
  double radius = 0.5;
  std::uint64_t seed = 0;
};

struct LocalQuadricFit {
  QuadricCoeffs coeffs;
  double residual_rms = 0.0;

  Matrix hessian() const { return coeffs.hessian(); }
  Vector gradient_at(const Vector& a) const { return coeffs.gradient(a); }
};

// Least-squares quadric through critic values at points drawn uniformly from
// the ball of the given radius around `center`.
LocalQuadricFit fit_local_quadric(const Critic& critic, const State& s, const Vector& center, int n_samples,
                                  double radius, std::uint64_t seed);
LocalQuadricFit fit_local_quadric(const Critic& critic, const State& s, const Vector& center, const FitConfig& cfg);

// Number of free coefficients of a quadric in d variables.
int quadric_coeff_count(int d);

}  // namespace epg
