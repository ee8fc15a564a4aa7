#pragma once

#include "epg/gradient.hpp"
#include "epg/linear_map.hpp"

namespace epg {

// Discrete policy pi(a|s) proportional to exp(logits(s)_a). In tied mode the
// logits are read as the critic values Q(., s), sharing the same parameters.
class SoftmaxPolicy {
 public:
  SoftmaxPolicy(LinearMap logits_map, Vector theta, bool tied_critic = false);

  // One logit per (state, action): theta laid out state-major.
  static SoftmaxPolicy tabular(int n_states, int n_actions, Vector theta, bool tied_critic = false);

  int n_actions() const { return map_.out_dim(); }
  const LinearMap& logits_map() const { return map_; }
  bool tied_critic() const { return tied_; }

  const Vector& params() const { return theta_; }
  void set_params(const Vector& theta);
  int n_params() const { return static_cast<int>(theta_.size()); }
  ParamLayout layout() const { return {{"logits", 0, n_params()}}; }

  Vector logits(const State& s) const;
  // n_actions x n_params
  Matrix logits_jacobian(const State& s) const;
  Vector probs(const State& s) const;
  double log_prob(const State& s, int a) const;
  GradientEstimate grad_log_prob(const State& s, int a) const;
  int sample(const State& s, Rng& rng) const;
  int sample(const State& s, std::uint64_t seed) const;
  int greedy_action(const State& s) const;

  double entropy(const State& s) const;

 private:
  LinearMap map_;
  Vector theta_;
  bool tied_;
};

// Gradient of the entropy H(s) = -sum_a pi log pi with respect to theta.
GradientEstimate policy_entropy_grad(const SoftmaxPolicy& policy, const State& s);

// S x A table of action probabilities for tabular states 0..n_states-1.
Matrix policy_table(const SoftmaxPolicy& policy, int n_states);

}  // namespace epg
