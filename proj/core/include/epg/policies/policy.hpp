#pragma once

#include <memory>
#include <string>

#include "epg/gradient.hpp"
#include "epg/types.hpp"

namespace epg {

struct ActionSample {
  Vector action;      // what the environment receives
  Vector pre_action;  // before any squash or clip; equals action otherwise
};

// Continuous-action policy with a flat parameter vector split into named
// blocks.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string class_name() const = 0;
  virtual int action_dim() const = 0;

  const Vector& params() const { return theta_; }
  virtual void set_params(const Vector& theta);
  int n_params() const { return static_cast<int>(theta_.size()); }
  virtual ParamLayout layout() const = 0;

  virtual ActionSample sample(const State& s, Rng& rng) const = 0;
  ActionSample sample(const State& s, std::uint64_t seed) const;

  virtual double log_prob(const State& s, const Vector& a) const = 0;
  virtual GradientEstimate grad_log_prob(const State& s, const Vector& a) const = 0;

  // Noise-free action used by evaluation runs.
  virtual Vector eval_action(const State& s) const = 0;
  // E[a | s] and its Jacobian in theta (action_dim x n_params).
  virtual Vector mean(const State& s) const = 0;
  virtual Matrix mean_jacobian(const State& s) const = 0;

  virtual std::unique_ptr<Policy> clone() const = 0;

 protected:
  Vector theta_;
};

}  // namespace epg
