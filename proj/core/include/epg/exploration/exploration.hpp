#pragma once

#include "epg/types.hpp"

namespace epg {

struct HessianEstimate {
  enum class Source { analytic, sigma_point };

  Matrix H;
  Source source = Source::analytic;
};

struct ExplorationConfig {
  double sigma0 = 0.2;
  // reward-scaling knob multiplying the Hessian inside the exponential
  double c = 1.0;

  void validate() const;
};

// sigma0 * U exp(c Lambda) U^T for H = U Lambda U^T. Throws ConfigError if H
// is asymmetric by more than 1e-6.
Matrix hessian_exploration_cov(const HessianEstimate& h, const ExplorationConfig& cfg);

// (I + H/n)^n sigma0 by repeated squaring.
Matrix exploration_limit_iterate(const Matrix& H, double sigma0, long n);

// n_i = -psi n_{i-1} + N(0, sigma^2 I). The stationary variance
// sigma^2 / (1 - psi^2) is finite for |psi| < 1.
struct OUConfig {
  double psi = 0.0;
  double sigma = 0.1;
  Vector state;

  OUConfig() = default;
  OUConfig(double psi_, double sigma_, int dim) : psi(psi_), sigma(sigma_), state(Vector::Zero(dim)) {}

  bool stable() const;
  double stationary_variance() const;
};

// Advances the noise state in place and returns it.
Vector ou_step(OUConfig& cfg, Rng& rng);
Vector ou_step(OUConfig& cfg, std::uint64_t seed);

}  // namespace epg
