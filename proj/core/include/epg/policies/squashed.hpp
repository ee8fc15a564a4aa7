#pragma once

#include "epg/policies/gaussian.hpp"

namespace epg {

enum class Squash { identity, sigmoid, exp };

const char* to_string(Squash g);
Squash squash_from_string(const std::string& name);

// Elementwise invertible maps b -> a.
double squash(Squash g, double b);
double squash_derivative(Squash g, double b);
Vector squash(Squash g, const Vector& b);
Vector unsquash(Squash g, const Vector& a);
double log_det_jacobian(Squash g, const Vector& b);

// a = g(b) with b drawn from a Gaussian base policy. Sigmoid gives the
// logit-normal family on (0,1)^d, exp the log-normal family on (0,inf)^d.
class SquashedPolicy : public Policy {
 public:
  SquashedPolicy(GaussianPolicy base, Squash g);

  const GaussianPolicy& base() const { return base_; }
  Squash squash_map() const { return g_; }

  std::string class_name() const override { return "squashed"; }
  int action_dim() const override { return base_.action_dim(); }
  void set_params(const Vector& theta) override;
  ParamLayout layout() const override { return base_.layout(); }

  ActionSample sample(const State& s, Rng& rng) const override;
  using Policy::sample;
  double log_prob(const State& s, const Vector& a) const override;
  // The log-det term does not depend on theta, so this is the base score at
  // g^-1(a).
  GradientEstimate grad_log_prob(const State& s, const Vector& a) const override;

  Vector eval_action(const State& s) const override { return squash(g_, base_.mu(s)); }
  Vector mean(const State& s) const override;
  Matrix mean_jacobian(const State& s) const override;

  std::unique_ptr<Policy> clone() const override { return std::make_unique<SquashedPolicy>(*this); }

 private:
  GaussianPolicy base_;
  Squash g_;
};

// a = clip(b, 0, 1) elementwise with b from a Gaussian base policy. The
// pre-clip action is returned alongside a by sample().
class ClippedPolicy : public Policy {
 public:
  explicit ClippedPolicy(GaussianPolicy base);

  const GaussianPolicy& base() const { return base_; }
  GaussianPolicy& base() { return base_; }

  std::string class_name() const override { return "clipped"; }
  int action_dim() const override { return base_.action_dim(); }
  void set_params(const Vector& theta) override;
  ParamLayout layout() const override { return base_.layout(); }

  static Vector clip(const Vector& b);

  ActionSample sample(const State& s, Rng& rng) const override;
  using Policy::sample;
  // Mixed density: atoms at 0 and 1 per coordinate. Requires a diagonal
  // covariance factor whenever some coordinate sits on a bound.
  double log_prob(const State& s, const Vector& a) const override;
  GradientEstimate grad_log_prob(const State& s, const Vector& a) const override;

  Vector eval_action(const State& s) const override { return clip(base_.mu(s)); }
  // E[clip(b)] per coordinate (closed form for the censored normal).
  Vector mean(const State& s) const override;
  Matrix mean_jacobian(const State& s) const override;

  // Probability masses of a_i = 0 and a_i = 1 per coordinate (columns 0, 1).
  Matrix atom_masses(const State& s) const;

  std::unique_ptr<Policy> clone() const override { return std::make_unique<ClippedPolicy>(*this); }

 private:
  GaussianPolicy base_;
};

double normal_cdf(double x);
double normal_pdf(double x);

}  // namespace epg
