#pragma once

#include "epg/env/tabular.hpp"
#include "epg/gradient.hpp"
#include "epg/policies/softmax.hpp"

namespace epg {

struct GeneralPgCheck {
  // sum_s rho(s) [grad V(s) - sum_a pi(a|s) grad Q(a, s)]
  GradientEstimate theorem_gradient;
  GradientEstimate finite_difference;
  // |theorem - fd| / |fd|
  double residual = 0.0;
  // max |dV, dQ from the resolvent identity - central differences|
  double resolvent_gap = 0.0;
};

// Exact derivatives of V and Q in theta (one column per parameter), obtained
// by differentiating V = (I - gamma P_pi)^-1 r_pi.
struct ValueDerivatives {
  Matrix dV;                // S x n_params
  std::vector<Matrix> dQ;   // per state: A x n_params
};

ValueDerivatives value_derivatives(const TabularMDP& mdp, const SoftmaxPolicy& policy);

GeneralPgCheck general_pg_check(const TabularMDP& mdp, const SoftmaxPolicy& policy, double epsilon = 1e-5);
double general_pg_residual(const TabularMDP& mdp, const SoftmaxPolicy& policy);

}  // namespace epg
