#pragma once

#include "epg/types.hpp"

namespace epg {

// s' = F s + G a + w,  w ~ N(0, noise_cov),  r(s, a) = s^T Qc s + a^T Rc a.
struct LQREnv {
  Matrix F;
  Matrix G;
  Matrix Qc;
  Matrix Rc;
  Matrix noise_cov;
  double gamma = 0.9;
  int horizon = 50;
  Vector initial_mean;
  Matrix initial_cov;

  int dim_s() const { return static_cast<int>(F.rows()); }
  int dim_a() const { return static_cast<int>(G.cols()); }

  void validate() const;

  double reward(const Vector& s, const Vector& a) const { return s.dot(Qc * s) + a.dot(Rc * a); }
  Vector reset(Rng& rng) const;
  Vector step(const Vector& s, const Vector& a, Rng& rng) const;
};

struct RiccatiSolution {
  // optimal action a = gain * s
  Matrix gain;
  // V*(s) = s^T value_quadric s + value_offset
  Matrix value_quadric;
  double value_offset = 0.0;
  // E[V*(s0)] under the initial distribution
  double optimal_return = 0.0;
  int iterations = 0;
};

// Iterates the discounted Riccati recursion to a fixed point (relative change
// < 1e-10). Throws InternalError if the recursion diverges.
RiccatiSolution lqr_riccati(const LQREnv& env);

// Norm of the Riccati fixed-point residual of a candidate value quadric.
double riccati_residual(const LQREnv& env, const Matrix& value_quadric);

// Symmetric PSD square root (eigenvalues clamped at 0).
Matrix psd_sqrt(const Matrix& m);

}  // namespace epg
