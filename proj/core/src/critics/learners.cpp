#include "epg/critics/learners.hpp"

namespace epg {

double sarsa_update(ParametricCritic& critic, const Transition& t, double alpha, double gamma) {
  if (!(alpha > 0.0)) throw ConfigError("sarsa_update: alpha must be positive");
  const double next = t.terminal ? 0.0 : critic.value(t.s_next, t.a_next);
  const double delta = t.r + gamma * next - critic.value(t.s, t.a);
  if (delta != 0.0) critic.set_params(critic.params() + alpha * delta * critic.param_gradient(t.s, t.a));
  return delta;
}

double sarsa_update(TabularQCritic& critic, const DiscreteTransition& t, double alpha, double gamma) {
  if (!(alpha > 0.0)) throw ConfigError("sarsa_update: alpha must be positive");
  const double next = t.terminal ? 0.0 : critic.value(t.s_next, t.a_next);
  const double delta = t.r + gamma * next - critic.value(t.s, t.a);
  critic.table()(t.s, t.a) += alpha * delta;
  return delta;
}

double expected_sarsa_update(ParametricCritic& critic, const Transition& t, const Policy& policy, double alpha,
                             double gamma, const ExpectationOptions& options) {
  if (!(alpha > 0.0)) throw ConfigError("expected_sarsa_update: alpha must be positive");
  const double next = t.terminal ? 0.0 : expected_value(policy, critic, t.s_next, options);
  const double delta = t.r + gamma * next - critic.value(t.s, t.a);
  if (delta != 0.0) critic.set_params(critic.params() + alpha * delta * critic.param_gradient(t.s, t.a));
  return delta;
}

double expected_sarsa_update(TabularQCritic& critic, const DiscreteTransition& t, const SoftmaxPolicy& policy,
                             double alpha, double gamma) {
  if (!(alpha > 0.0)) throw ConfigError("expected_sarsa_update: alpha must be positive");
  const double next = t.terminal ? 0.0 : expected_value(policy, critic, State::tabular(t.s_next));
  const double delta = t.r + gamma * next - critic.value(t.s, t.a);
  critic.table()(t.s, t.a) += alpha * delta;
  return delta;
}

double td_advantage(const ValueFunction& v, const State& s, double r, const State& s_next, double gamma,
                    bool terminal) {
  const double next = terminal ? 0.0 : v.value(s_next);
  return r + gamma * next - v.value(s);
}

double td0_update(ValueFunction& v, const State& s, double r, const State& s_next, double alpha, double gamma,
                  bool terminal) {
  const double delta = td_advantage(v, s, r, s_next, gamma, terminal);
  v.set_params(v.params() + alpha * delta * v.param_gradient(s));
  return delta;
}

RlsLearner::RlsLearner(int n_params, double forgetting, double initial_scale)
    : forgetting_(forgetting), p_(initial_scale * Matrix::Identity(n_params, n_params)) {
  if (!(forgetting > 0.0 && forgetting <= 1.0)) throw ConfigError("RlsLearner: forgetting must lie in (0, 1]");
  if (!(initial_scale > 0.0)) throw ConfigError("RlsLearner: initial_scale must be positive");
}

double RlsLearner::update(ParametricCritic& critic, const State& s, const Vector& a, double target) {
  if (critic.n_params() != p_.rows()) throw ConfigError("RlsLearner: parameter count mismatch");
  const Vector phi = critic.param_gradient(s, a);
  const double err = target - critic.value(s, a);
  const Vector p_phi = p_ * phi;
  const Vector gain = p_phi / (forgetting_ + phi.dot(p_phi));
  critic.set_params(critic.params() + gain * err);
  p_ = (p_ - gain * p_phi.transpose()) / forgetting_;
  p_ = 0.5 * (p_ + p_.transpose());
  return err;
}

double RlsLearner::expected_sarsa_update(ParametricCritic& critic, const Transition& t, const Policy& policy,
                                         double gamma, const ExpectationOptions& options) {
  const double next = t.terminal ? 0.0 : expected_value(policy, critic, t.s_next, options);
  return update(critic, t.s, t.a, t.r + gamma * next);
}

}  // namespace epg
