#pragma once

#include "epg/linear_map.hpp"
#include "epg/policies/policy.hpp"

namespace epg {

// Deterministic policy a = action_map(theta, s).
class DiracPolicy : public Policy {
 public:
  DiracPolicy(LinearMap action_map, Vector theta);

  const LinearMap& action_map() const { return map_; }

  std::string class_name() const override { return "dirac"; }
  int action_dim() const override { return map_.out_dim(); }
  ParamLayout layout() const override { return {{"mean", 0, n_params()}}; }

  Vector action(const State& s) const { return map_.eval(theta_, s); }
  Matrix action_jacobian(const State& s) const { return map_.jacobian(s); }

  ActionSample sample(const State& s, Rng& rng) const override;
  using Policy::sample;
  // A point mass has no density; both throw DomainError.
  double log_prob(const State& s, const Vector& a) const override;
  GradientEstimate grad_log_prob(const State& s, const Vector& a) const override;

  Vector eval_action(const State& s) const override { return action(s); }
  Vector mean(const State& s) const override { return action(s); }
  Matrix mean_jacobian(const State& s) const override { return action_jacobian(s); }

  std::unique_ptr<Policy> clone() const override { return std::make_unique<DiracPolicy>(*this); }

 private:
  LinearMap map_;
};

}  // namespace epg
