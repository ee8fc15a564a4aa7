#pragma once

#include <vector>

#include "epg/env/bandit.hpp"
#include "epg/env/lqr.hpp"
#include "epg/env/tabular.hpp"
#include "epg/policies/policy.hpp"
#include "epg/policies/softmax.hpp"

namespace epg {

struct Step {
  State state;
  Vector action;
  Vector pre_action;
  int action_index = -1;  // discrete environments only
  double reward = 0.0;
  State next_state;
};

struct Trajectory {
  std::vector<Step> steps;
  // discount_weights[t] = gamma^t
  std::vector<double> discount_weights;

  double discounted_return() const;
};

Trajectory sample_trajectory(const TabularMDP& mdp, const SoftmaxPolicy& policy, int horizon, std::uint64_t seed);
Trajectory sample_trajectory(const LQREnv& env, const Policy& policy, int horizon, std::uint64_t seed);
// A bandit episode has exactly one step.
Trajectory sample_trajectory(const BoundedBandit& env, const Policy& policy, int horizon, std::uint64_t seed);

}  // namespace epg
