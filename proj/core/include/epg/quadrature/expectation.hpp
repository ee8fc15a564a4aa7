#pragma once

#include "epg/critics/critic.hpp"
#include "epg/critics/tabular.hpp"
#include "epg/policies/policy.hpp"
#include "epg/policies/softmax.hpp"

namespace epg {

struct ExpectationOptions {
  // Per-dimension Gauss-Hermite order used when no closed form applies to a
  // Gaussian-based policy; 0 disables the fallback.
  int hermite_order = 0;
};

// E_{a ~ pi(.|s)}[Q(a, s)]. Closed forms: Dirac (point evaluation), Gaussian
// with a quadric or polynomial critic, exponential families with polynomial
// critics. Squashed and clipped policies are integrated over the base
// Gaussian by Gauss-Hermite when configured.
double expected_value(const Policy& policy, const Critic& critic, const State& s,
                      const ExpectationOptions& options = {});

double expected_value(const SoftmaxPolicy& policy, const DiscreteCritic& critic, const State& s);

}  // namespace epg
