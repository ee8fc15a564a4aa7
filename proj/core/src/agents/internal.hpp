#pragma once

#include <memory>

#include "epg/agents/config.hpp"

namespace epg::detail {

// Continuous policies and parametric critics held behind their base classes.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec);
std::unique_ptr<ParametricCritic> make_critic(const CriticSpec& spec);

// The Gaussian inside Gaussian and clipped policies; nullptr otherwise.
const GaussianPolicy* gaussian_core(const Policy& p);
GaussianPolicy* gaussian_core(Policy& p);
// The distribution over critic coordinates: the base of squashed and clipped
// policies, the policy itself otherwise.
const Policy& critic_policy(const Policy& p);

bool is_tabular(const RunConfig& c);

}  // namespace epg::detail
