#include "epg/critics/tabular.hpp"

namespace epg {

TabularQCritic::TabularQCritic(int n_states, int n_actions) : table_(Matrix::Zero(n_states, n_actions)) {
  if (n_states < 1 || n_actions < 1) throw ConfigError("TabularQCritic: dimensions must be positive");
}

TabularQCritic::TabularQCritic(Matrix table) : table_(std::move(table)) {
  if (table_.rows() < 1 || table_.cols() < 1) throw ConfigError("TabularQCritic: empty table");
}

Vector TabularQCritic::action_values(const State& s) const {
  if (s.index < 0 || s.index >= n_states()) throw ConfigError("TabularQCritic: state index out of range");
  return table_.row(s.index).transpose();
}

TiedSoftmaxCritic::TiedSoftmaxCritic(SoftmaxPolicy policy) : policy_(std::move(policy)) {
  if (!policy_.tied_critic()) throw ConfigError("TiedSoftmaxCritic: policy is not in tied-critic mode");
}

ShiftedDiscreteCritic::ShiftedDiscreteCritic(const DiscreteCritic& base, SoftmaxPolicy policy, double alpha)
    : base_(base.clone()), policy_(std::move(policy)), alpha_(alpha) {
  if (base.n_actions() != policy_.n_actions()) throw ConfigError("entropy_shift: action count mismatch");
}

ShiftedDiscreteCritic::ShiftedDiscreteCritic(const ShiftedDiscreteCritic& o)
    : DiscreteCritic(o), base_(o.base_->clone()), policy_(o.policy_), alpha_(o.alpha_) {}

Vector ShiftedDiscreteCritic::action_values(const State& s) const {
  Vector q = base_->action_values(s);
  if (alpha_ == 0.0) return q;
  const Vector logp = policy_.probs(s).array().log();
  return q - alpha_ * logp;
}

ShiftedDiscreteCritic entropy_shift(const DiscreteCritic& critic, const SoftmaxPolicy& policy, double alpha) {
  return ShiftedDiscreteCritic(critic, policy, alpha);
}

}  // namespace epg
