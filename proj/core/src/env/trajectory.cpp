#include "epg/env/trajectory.hpp"

#include <cmath>

namespace epg {

double Trajectory::discounted_return() const {
  double g = 0.0;
  for (std::size_t t = 0; t < steps.size(); ++t) g += discount_weights[t] * steps[t].reward;
  return g;
}

namespace {

int draw_index(const Vector& p, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    acc += p(i);
    if (u < acc) return i;
  }
  return static_cast<int>(p.size()) - 1;
}

void check_horizon(int horizon) {
  if (horizon < 1) throw ConfigError("sample_trajectory: horizon must be >= 1");
}

}  // namespace

Trajectory sample_trajectory(const TabularMDP& mdp, const SoftmaxPolicy& policy, int horizon, std::uint64_t seed) {
  check_horizon(horizon);
  if (policy.n_actions() != mdp.n_actions) throw ConfigError("sample_trajectory: policy action count mismatch");
  Rng rng = make_rng(seed);
  Trajectory traj;
  int s = draw_index(mdp.initial, rng);
  for (int t = 0; t < horizon; ++t) {
    const State st = State::tabular(s);
    const int a = policy.sample(st, rng);
    const int s_next = draw_index(mdp.transition[s].row(a).transpose(), rng);
    Step step;
    step.state = st;
    step.action = Vector::Constant(1, a);
    step.pre_action = step.action;
    step.action_index = a;
    step.reward = mdp.reward(s, a);
    step.next_state = State::tabular(s_next);
    traj.steps.push_back(std::move(step));
    traj.discount_weights.push_back(std::pow(mdp.gamma, t));
    s = s_next;
  }
  return traj;
}

Trajectory sample_trajectory(const LQREnv& env, const Policy& policy, int horizon, std::uint64_t seed) {
  check_horizon(horizon);
  if (policy.action_dim() != env.dim_a()) throw ConfigError("sample_trajectory: policy action dimension mismatch");
  Rng rng = make_rng(seed);
  Trajectory traj;
  Vector s = env.reset(rng);
  for (int t = 0; t < horizon; ++t) {
    const State st = State::continuous(s);
    const ActionSample a = policy.sample(st, rng);
    const Vector s_next = env.step(s, a.action, rng);
    traj.steps.push_back({st, a.action, a.pre_action, -1, env.reward(s, a.action), State::continuous(s_next)});
    traj.discount_weights.push_back(std::pow(env.gamma, t));
    s = s_next;
  }
  return traj;
}

Trajectory sample_trajectory(const BoundedBandit& env, const Policy& policy, int horizon, std::uint64_t seed) {
  check_horizon(horizon);
  if (policy.action_dim() != env.dim_a) throw ConfigError("sample_trajectory: policy action dimension mismatch");
  Rng rng = make_rng(seed);
  const State st = State::tabular(0);
  const ActionSample a = policy.sample(st, rng);
  Trajectory traj;
  traj.steps.push_back({st, a.action, a.pre_action, -1, env.reward(a.action), st});
  traj.discount_weights.push_back(1.0);
  return traj;
}

}  // namespace epg
