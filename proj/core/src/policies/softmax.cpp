#include "epg/policies/softmax.hpp"

#include <cmath>

namespace epg {

SoftmaxPolicy::SoftmaxPolicy(LinearMap logits_map, Vector theta, bool tied_critic)
    : map_(std::move(logits_map)), theta_(std::move(theta)), tied_(tied_critic) {
  if (theta_.size() != map_.n_params()) {
    throw ConfigError("SoftmaxPolicy: expected " + std::to_string(map_.n_params()) + " parameters, got " +
                      std::to_string(theta_.size()));
  }
}

SoftmaxPolicy SoftmaxPolicy::tabular(int n_states, int n_actions, Vector theta, bool tied_critic) {
  return SoftmaxPolicy(LinearMap::tabular(n_states, n_actions), std::move(theta), tied_critic);
}

void SoftmaxPolicy::set_params(const Vector& theta) {
  if (theta.size() != theta_.size()) throw ConfigError("SoftmaxPolicy: parameter count mismatch");
  theta_ = theta;
}

Vector SoftmaxPolicy::logits(const State& s) const { return map_.eval(theta_, s); }

Matrix SoftmaxPolicy::logits_jacobian(const State& s) const { return map_.jacobian(s); }

Vector SoftmaxPolicy::probs(const State& s) const {
  const Vector z = logits(s);
  Vector p = (z.array() - z.maxCoeff()).exp();
  return p / p.sum();
}

double SoftmaxPolicy::log_prob(const State& s, int a) const {
  if (a < 0 || a >= n_actions()) throw DomainError("SoftmaxPolicy: action index out of range");
  const Vector z = logits(s);
  const double m = z.maxCoeff();
  return z(a) - m - std::log((z.array() - m).exp().sum());
}

GradientEstimate SoftmaxPolicy::grad_log_prob(const State& s, int a) const {
  if (a < 0 || a >= n_actions()) throw DomainError("SoftmaxPolicy: action index out of range");
  Vector e = -probs(s);
  e(a) += 1.0;
  return GradientEstimate(layout(), logits_jacobian(s).transpose() * e, "score");
}

int SoftmaxPolicy::sample(const State& s, Rng& rng) const {
  const Vector p = probs(s);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (int a = 0; a < p.size(); ++a) {
    acc += p(a);
    if (u < acc) return a;
  }
  return static_cast<int>(p.size()) - 1;
}

int SoftmaxPolicy::sample(const State& s, std::uint64_t seed) const {
  Rng rng = make_rng(seed);
  return sample(s, rng);
}

int SoftmaxPolicy::greedy_action(const State& s) const {
  Eigen::Index a = 0;
  logits(s).maxCoeff(&a);
  return static_cast<int>(a);
}

double SoftmaxPolicy::entropy(const State& s) const {
  const Vector p = probs(s);
  double h = 0.0;
  for (int a = 0; a < p.size(); ++a) {
    if (p(a) > 0.0) h -= p(a) * std::log(p(a));
  }
  return h;
}

GradientEstimate policy_entropy_grad(const SoftmaxPolicy& policy, const State& s) {
  // grad H = -sum_a pi_a grad log pi_a (log pi_a + 1) = -sum_a pi_a grad log pi_a log pi_a
  const Vector p = policy.probs(s);
  const Vector logp = p.array().log();
  // d log pi_a / d z = e_a - p, so sum_a p_a log p_a (e_a - p) = p .* (logp - p.logp)
  const Vector dz = -(p.array() * (logp.array() - p.dot(logp))).matrix();
  return GradientEstimate(policy.layout(), policy.logits_jacobian(s).transpose() * dz, "entropy");
}

Matrix policy_table(const SoftmaxPolicy& policy, int n_states) {
  Matrix pi(n_states, policy.n_actions());
  for (int s = 0; s < n_states; ++s) pi.row(s) = policy.probs(State::tabular(s)).transpose();
  return pi;
}

}  // namespace epg
