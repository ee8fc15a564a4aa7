#pragma once

#include <memory>

#include "epg/policies/softmax.hpp"

namespace epg {

// Critic over a finite action set: one value per action at each state.
class DiscreteCritic {
 public:
  virtual ~DiscreteCritic() = default;
  virtual int n_actions() const = 0;
  virtual Vector action_values(const State& s) const = 0;
  virtual std::unique_ptr<DiscreteCritic> clone() const = 0;
};

class TabularQCritic : public DiscreteCritic {
 public:
  TabularQCritic(int n_states, int n_actions);
  explicit TabularQCritic(Matrix table);

  int n_states() const { return static_cast<int>(table_.rows()); }
  int n_actions() const override { return static_cast<int>(table_.cols()); }
  const Matrix& table() const { return table_; }
  Matrix& table() { return table_; }
  double value(int s, int a) const { return table_(s, a); }

  Vector action_values(const State& s) const override;
  std::unique_ptr<DiscreteCritic> clone() const override { return std::make_unique<TabularQCritic>(*this); }

 private:
  Matrix table_;
};

// The critic implied by a tied softmax policy: Q(., s) = logits(s).
class TiedSoftmaxCritic : public DiscreteCritic {
 public:
  explicit TiedSoftmaxCritic(SoftmaxPolicy policy);

  int n_actions() const override { return policy_.n_actions(); }
  Vector action_values(const State& s) const override { return policy_.logits(s); }
  std::unique_ptr<DiscreteCritic> clone() const override { return std::make_unique<TiedSoftmaxCritic>(*this); }

 private:
  SoftmaxPolicy policy_;
};

// Q'(a, s) = Q(a, s) - alpha log pi(a|s).
class ShiftedDiscreteCritic : public DiscreteCritic {
 public:
  ShiftedDiscreteCritic(const DiscreteCritic& base, SoftmaxPolicy policy, double alpha);
  ShiftedDiscreteCritic(const ShiftedDiscreteCritic& o);

  int n_actions() const override { return base_->n_actions(); }
  Vector action_values(const State& s) const override;
  std::unique_ptr<DiscreteCritic> clone() const override { return std::make_unique<ShiftedDiscreteCritic>(*this); }

 private:
  std::unique_ptr<DiscreteCritic> base_;
  SoftmaxPolicy policy_;
  double alpha_;
};

ShiftedDiscreteCritic entropy_shift(const DiscreteCritic& critic, const SoftmaxPolicy& policy, double alpha);

}  // namespace epg
