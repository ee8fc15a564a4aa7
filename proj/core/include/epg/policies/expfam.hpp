#pragma once

#include <vector>

#include "epg/linear_map.hpp"
#include "epg/policies/gaussian.hpp"
#include "epg/policies/moments.hpp"
#include "epg/policies/policy.hpp"
#include "epg/polynomial.hpp"

namespace epg {

// pi(a|s) = exp(eta(s)^T T(a) - U(eta(s)) + W(a)) with polynomial T.
class ExpFamilyPolicy : public Policy {
 public:
  virtual const std::vector<PolyCoeffs>& sufficient_stats() const = 0;
  virtual Vector natural_params(const State& s) const = 0;
  // n_stats x n_params
  virtual Matrix natural_params_jacobian(const State& s) const = 0;
  virtual double log_partition(const State& s) const = 0;
  virtual Vector log_partition_gradient(const State& s) const = 0;
  virtual double carrier(const Vector& a) const = 0;
  virtual bool in_support(const Vector& a) const = 0;
  virtual MomentVector moments(const State& s, int degree_bound) const = 0;

  int stats_degree() const;
  Vector eval_stats(const Vector& a) const;

  double log_prob(const State& s, const Vector& a) const override;
  GradientEstimate grad_log_prob(const State& s, const Vector& a) const override;
};

// A Gaussian policy viewed as an exponential family with
// T(a) = [a; vec(a a^T)], eta = [S^-1 mu; -vec(S^-1)/2].
class GaussianExpFamily : public ExpFamilyPolicy {
 public:
  explicit GaussianExpFamily(GaussianPolicy base);

  const GaussianPolicy& base() const { return base_; }

  std::string class_name() const override { return "gaussian_expfam"; }
  int action_dim() const override { return base_.action_dim(); }
  void set_params(const Vector& theta) override;
  ParamLayout layout() const override { return base_.layout(); }

  const std::vector<PolyCoeffs>& sufficient_stats() const override { return stats_; }
  Vector natural_params(const State& s) const override;
  Matrix natural_params_jacobian(const State& s) const override;
  double log_partition(const State& s) const override;
  Vector log_partition_gradient(const State& s) const override;
  double carrier(const Vector&) const override { return 0.0; }
  bool in_support(const Vector&) const override { return true; }
  MomentVector moments(const State& s, int degree_bound) const override;

  ActionSample sample(const State& s, Rng& rng) const override { return base_.sample(s, rng); }
  using Policy::sample;
  Vector eval_action(const State& s) const override { return base_.mu(s); }
  Vector mean(const State& s) const override { return base_.mu(s); }
  Matrix mean_jacobian(const State& s) const override { return base_.mu_jacobian(s); }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<GaussianExpFamily>(*this); }

 private:
  GaussianPolicy base_;
  std::vector<PolyCoeffs> stats_;
};

// One-dimensional Gamma policy with fixed shape k and rate exp(rate_map(s)):
// T(a) = a, eta = -rate, W(a) = (k - 1) log a, support a > 0.
class GammaPolicy : public ExpFamilyPolicy {
 public:
  GammaPolicy(double shape, LinearMap log_rate_map, Vector theta);

  double shape() const { return shape_; }
  const LinearMap& log_rate_map() const { return map_; }
  double rate(const State& s) const;

  std::string class_name() const override { return "gamma"; }
  int action_dim() const override { return 1; }
  ParamLayout layout() const override { return {{"rate", 0, n_params()}}; }

  const std::vector<PolyCoeffs>& sufficient_stats() const override { return stats_; }
  Vector natural_params(const State& s) const override;
  Matrix natural_params_jacobian(const State& s) const override;
  double log_partition(const State& s) const override;
  Vector log_partition_gradient(const State& s) const override;
  double carrier(const Vector& a) const override;
  bool in_support(const Vector& a) const override { return a.size() == 1 && a(0) > 0.0; }
  MomentVector moments(const State& s, int degree_bound) const override;

  ActionSample sample(const State& s, Rng& rng) const override;
  using Policy::sample;
  Vector eval_action(const State& s) const override { return mean(s); }
  Vector mean(const State& s) const override;
  Matrix mean_jacobian(const State& s) const override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<GammaPolicy>(*this); }

 private:
  double shape_;
  LinearMap map_;
  std::vector<PolyCoeffs> stats_;
};

// One-dimensional family with T(a) = (a, a^2, ..., a^K), K even, W = 0.
// The log-partition and moments have no closed form and are computed by
// composite Gauss-Legendre quadrature over an adaptively located window.
class PolyExpPolicy : public ExpFamilyPolicy {
 public:
  PolyExpPolicy(int degree, LinearMap eta_map, Vector theta);

  int degree() const { return degree_; }
  const LinearMap& eta_map() const { return map_; }

  std::string class_name() const override { return "polyexp"; }
  int action_dim() const override { return 1; }
  ParamLayout layout() const override { return {{"natural", 0, n_params()}}; }

  const std::vector<PolyCoeffs>& sufficient_stats() const override { return stats_; }
  Vector natural_params(const State& s) const override;
  Matrix natural_params_jacobian(const State& s) const override;
  double log_partition(const State& s) const override;
  Vector log_partition_gradient(const State& s) const override;
  double carrier(const Vector&) const override { return 0.0; }
  bool in_support(const Vector& a) const override { return a.size() == 1; }
  MomentVector moments(const State& s, int degree_bound) const override;

  ActionSample sample(const State& s, Rng& rng) const override;
  using Policy::sample;
  Vector eval_action(const State& s) const override { return mean(s); }
  Vector mean(const State& s) const override;
  Matrix mean_jacobian(const State& s) const override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<PolyExpPolicy>(*this); }

  // Degree above which fallback moments are always flagged.
  static constexpr int kMomentDegreeBudget = 16;

 private:
  struct Window {
    double lo;
    double hi;
    double log_peak;
  };
  Window window(const Vector& eta) const;
  double log_density_unnormalised(const Vector& eta, double a) const;

  int degree_;
  LinearMap map_;
  std::vector<PolyCoeffs> stats_;
};

// Dispatches to the policy's moment engine.
MomentVector expfam_moments(const ExpFamilyPolicy& policy, const State& s, int degree_bound);
MomentVector expfam_moments(const GaussianPolicy& policy, const State& s, int degree_bound);

}  // namespace epg
