#pragma once

#include <optional>

#include "epg/linear_map.hpp"
#include "epg/policies/policy.hpp"

namespace epg {

enum class CovarianceMode { learned, hessian_derived };

const char* to_string(CovarianceMode mode);
CovarianceMode covariance_mode_from_string(const std::string& name);

// N(mu_s, L_s L_s^T) with mu_s = mean_map(theta_mean, s) and the full-matrix
// factor L_s = reshape(cov_map(theta_cov, s), d, d). Parameters are laid out
// as [mean | cov].
class GaussianPolicy : public Policy {
 public:
  GaussianPolicy(LinearMap mean_map, LinearMap cov_map, Vector theta,
                 CovarianceMode mode = CovarianceMode::learned);

  // State-independent policy with theta = [mu; vec(L)].
  static GaussianPolicy constant(const Vector& mu, const Matrix& cov_factor);

  std::string class_name() const override { return "gaussian"; }
  int action_dim() const override { return dim_; }
  ParamLayout layout() const override;

  const LinearMap& mean_map() const { return mean_map_; }
  const LinearMap& cov_map() const { return cov_map_; }
  int n_mean_params() const { return mean_map_.n_params(); }
  int n_cov_params() const { return cov_map_.n_params(); }

  CovarianceMode covariance_mode() const { return mode_; }
  void set_covariance_mode(CovarianceMode mode) { mode_ = mode; }
  // In hessian-derived mode the factor is supplied externally each step; the
  // covariance parameters are then inactive.
  void set_covariance_override(const Matrix& cov_factor);
  void clear_covariance_override() { override_.reset(); }
  bool has_covariance_override() const { return override_.has_value(); }

  Vector mu(const State& s) const;
  Matrix cov_factor(const State& s) const;
  Matrix covariance(const State& s) const;
  // d x n_params, zero in the covariance columns
  Matrix mu_jacobian(const State& s) const;
  // d*d x n_params (column-major vec of L), zero in the mean columns and
  // entirely zero while a covariance override is active
  Matrix cov_factor_jacobian(const State& s) const;

  ActionSample sample(const State& s, Rng& rng) const override;
  using Policy::sample;
  double log_prob(const State& s, const Vector& a) const override;
  GradientEstimate grad_log_prob(const State& s, const Vector& a) const override;

  Vector eval_action(const State& s) const override { return mu(s); }
  Vector mean(const State& s) const override { return mu(s); }
  Matrix mean_jacobian(const State& s) const override { return mu_jacobian(s); }

  std::unique_ptr<Policy> clone() const override { return std::make_unique<GaussianPolicy>(*this); }

 private:
  LinearMap mean_map_;
  LinearMap cov_map_;
  int dim_;
  CovarianceMode mode_;
  std::optional<Matrix> override_;
};

// Per-state quantities of a Gaussian policy, precomputed once so that many
// score evaluations at the same state are cheap.
class GaussianScore {
 public:
  GaussianScore(const GaussianPolicy& policy, const State& s);

  const Vector& mu() const { return mu_; }
  const Matrix& cov_factor() const { return l_; }
  double log_prob(const Vector& a) const;
  // d/dtheta log pi(a|s)
  Vector score(const Vector& a) const;

 private:
  Vector mu_;
  Matrix l_;
  Matrix l_inv_;
  Matrix l_inv_t_;
  Matrix j_mu_t_;
  Matrix j_l_t_;
  double log_norm_;
};

// Throws DomainError when |det L| <= 1e-12.
void check_cov_factor(const Matrix& cov_factor);

}  // namespace epg
