#include "epg/env/tabular.hpp"

#include <cmath>

namespace epg {

namespace {

void check_distribution(const Vector& p, const std::string& what) {
  if ((p.array() < 0.0).any()) throw ConfigError(what + " has negative entries");
  if (std::abs(p.sum() - 1.0) > 1e-12) throw ConfigError(what + " does not sum to 1");
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
}

Vector dirichlet_one(int n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  Vector p(n);
  for (int i = 0; i < n; ++i) p(i) = e(rng);
  p /= p.sum();
  // renormalise so the sum is 1 to the last bit that matters here
  p(n - 1) = 1.0 - (p.sum() - p(n - 1));
  return p;
}

void check_pi(const TabularMDP& mdp, const Matrix& pi) {
  if (pi.rows() != mdp.n_states || pi.cols() != mdp.n_actions) {
    throw ConfigError("policy table shape does not match the MDP");
  }
}

}  // namespace

void TabularMDP::validate() const {
  if (n_states < 1 || n_actions < 1) throw ConfigError("TabularMDP: sizes must be positive");
  if (static_cast<int>(transition.size()) != n_states) throw ConfigError("TabularMDP: need one transition block per state");
  for (int s = 0; s < n_states; ++s) {
    if (transition[s].rows() != n_actions || transition[s].cols() != n_states) {
      throw ConfigError("TabularMDP: transition block has the wrong shape");
    }
    for (int a = 0; a < n_actions; ++a) {
      check_distribution(transition[s].row(a).transpose(),
                         "TabularMDP: P[" + std::to_string(s) + "][" + std::to_string(a) + "]");
    }
  }
  if (reward.rows() != n_states || reward.cols() != n_actions) throw ConfigError("TabularMDP: reward shape mismatch");
  if (initial.size() != n_states) throw ConfigError("TabularMDP: initial distribution size mismatch");
  check_distribution(initial, "TabularMDP: p0");
  check_gamma(gamma);
}

Matrix TabularMDP::policy_transition(const Matrix& pi) const {
  check_pi(*this, pi);
  Matrix p(n_states, n_states);
  for (int s = 0; s < n_states; ++s) p.row(s) = pi.row(s) * transition[s];
  return p;
}

Vector TabularMDP::policy_reward(const Matrix& pi) const {
  check_pi(*this, pi);
  return pi.cwiseProduct(reward).rowwise().sum();
}

TabularMDP random_tabular_mdp(int n_states, int n_actions, double gamma, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  TabularMDP mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.gamma = gamma;
  for (int s = 0; s < n_states; ++s) {
    Matrix block(n_actions, n_states);
    for (int a = 0; a < n_actions; ++a) block.row(a) = dirichlet_one(n_states, rng).transpose();
    mdp.transition.push_back(block);
  }
  mdp.reward = Matrix(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) mdp.reward(s, a) = unif(rng);
  }
  mdp.initial = dirichlet_one(n_states, rng);
  mdp.validate();
  return mdp;
}

void MRP::validate() const {
  const int n = n_states();
  if (n < 1) throw ConfigError("MRP: no states");
  if (transition.rows() != n || transition.cols() != n) throw ConfigError("MRP: transition shape mismatch");
  for (int s = 0; s < n; ++s) check_distribution(transition.row(s).transpose(), "MRP: transition row");
  if (reward_var.size() != n) throw ConfigError("MRP: reward_var size mismatch");
  if ((reward_var.array() < 0.0).any()) throw ConfigError("MRP: reward_var must be non-negative");
  if (initial.size() != n) throw ConfigError("MRP: initial size mismatch");
  check_gamma(gamma);
}

MRP random_mrp(int n_states, double gamma, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  MRP m;
  m.transition = Matrix(n_states, n_states);
  for (int s = 0; s < n_states; ++s) m.transition.row(s) = dirichlet_one(n_states, rng).transpose();
  m.reward_mean = Vector(n_states);
  m.reward_var = Vector(n_states);
  for (int s = 0; s < n_states; ++s) {
    m.reward_mean(s) = unif(rng);
    m.reward_var(s) = pos(rng);
  }
  m.initial = dirichlet_one(n_states, rng);
  m.gamma = gamma;
  return m;
}

MRP induced_mrp(const TabularMDP& mdp, const Matrix& pi) {
  MRP m;
  m.transition = mdp.policy_transition(pi);
  m.reward_mean = mdp.policy_reward(pi);
  m.reward_var = Vector::Zero(mdp.n_states);
  m.initial = mdp.initial;
  m.gamma = mdp.gamma;
  return m;
}

OccupancyVector discounted_occupancy(const TabularMDP& mdp, const Matrix& pi) {
  const Matrix p = mdp.policy_transition(pi);
  const int n = mdp.n_states;
  const Matrix system = Matrix::Identity(n, n) - mdp.gamma * p.transpose();
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) throw InternalError("discounted_occupancy: singular system");
  return {lu.solve(mdp.initial)};
}

OccupancyVector discounted_occupancy(const TabularMDP& mdp, const SoftmaxPolicy& policy) {
  return discounted_occupancy(mdp, policy_table(policy, mdp.n_states));
}

double occupancy_expectation(const TabularMDP& mdp, const Matrix& pi, const Vector& f) {
  if (f.size() != mdp.n_states) throw ConfigError("occupancy_expectation: f has the wrong size");
  return discounted_occupancy(mdp, pi).rho.dot(f);
}

double occupancy_expectation(const TabularMDP& mdp, const SoftmaxPolicy& policy, const Vector& f) {
  return occupancy_expectation(mdp, policy_table(policy, mdp.n_states), f);
}

double eigenfunction_residual(const TabularMDP& mdp, const Matrix& pi, const Vector& f) {
  if (f.size() != mdp.n_states) throw ConfigError("eigenfunction_residual: f has the wrong size");
  const Vector rho = discounted_occupancy(mdp, pi).rho;
  const Matrix p = mdp.policy_transition(pi);
  return std::abs(mdp.gamma * rho.dot(p * f) - (rho.dot(f) - mdp.initial.dot(f)));
}

double eigenfunction_residual(const TabularMDP& mdp, const SoftmaxPolicy& policy, const Vector& f) {
  return eigenfunction_residual(mdp, policy_table(policy, mdp.n_states), f);
}

namespace {

Vector bellman_solve(const Matrix& p, const Vector& u, double gamma) {
  const int n = static_cast<int>(u.size());
  Eigen::FullPivLU<Matrix> lu(Matrix::Identity(n, n) - gamma * p);
  if (!lu.isInvertible()) throw InternalError("Bellman solve: singular system");
  return lu.solve(u);
}

}  // namespace

Vector mrp_value(const MRP& mrp) { return bellman_solve(mrp.transition, mrp.reward_mean, mrp.gamma); }

Vector mrp_second_moment(const MRP& mrp) {
  const Vector v = mrp_value(mrp);
  const Vector m = mrp.reward_mean;
  const Vector u2 = mrp.reward_var + m.cwiseProduct(m) + 2.0 * mrp.gamma * m.cwiseProduct(mrp.transition * v);
  return bellman_solve(mrp.transition, u2, mrp.gamma * mrp.gamma);
}

std::pair<Vector, Vector> mdp_reward_moments(const TabularMDP& mdp, const Matrix& pi, const Matrix& x) {
  if (x.rows() != mdp.n_states || x.cols() != mdp.n_actions) throw ConfigError("mdp_reward_moments: x shape mismatch");
  const Matrix p = mdp.policy_transition(pi);
  const Vector w = bellman_solve(p, pi.cwiseProduct(x).rowwise().sum(), mdp.gamma);
  Vector u2(mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s) {
    double acc = 0.0;
    for (int a = 0; a < mdp.n_actions; ++a) {
      const double next = mdp.transition[s].row(a).dot(w);
      acc += pi(s, a) * (x(s, a) * x(s, a) + 2.0 * mdp.gamma * x(s, a) * next);
    }
    u2(s) = acc;
  }
  return {w, bellman_solve(p, u2, mdp.gamma * mdp.gamma)};
}

Vector policy_values(const TabularMDP& mdp, const Matrix& pi) {
  return bellman_solve(mdp.policy_transition(pi), mdp.policy_reward(pi), mdp.gamma);
}

Matrix action_values(const TabularMDP& mdp, const Matrix& pi) {
  const Vector v = policy_values(mdp, pi);
  Matrix q(mdp.n_states, mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s) q.row(s) = mdp.reward.row(s) + mdp.gamma * (mdp.transition[s] * v).transpose();
  return q;
}

double expected_return(const TabularMDP& mdp, const Matrix& pi) { return mdp.initial.dot(policy_values(mdp, pi)); }

double expected_return(const TabularMDP& mdp, const SoftmaxPolicy& policy) {
  return expected_return(mdp, policy_table(policy, mdp.n_states));
}

GradientEstimate finite_difference_grad_J(const TabularMDP& mdp, const SoftmaxPolicy& policy, double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("finite_difference_grad_J: epsilon must be positive");
  SoftmaxPolicy probe = policy;
  const Vector theta = policy.params();
  Vector g(theta.size());
  for (int i = 0; i < theta.size(); ++i) {
    Vector t = theta;
    t(i) = theta(i) + epsilon;
    probe.set_params(t);
    const double up = expected_return(mdp, probe);
    t(i) = theta(i) - epsilon;
    probe.set_params(t);
    const double down = expected_return(mdp, probe);
    g(i) = (up - down) / (2.0 * epsilon);
  }
  return GradientEstimate(policy.layout(), g, "finite_difference");
}

}  // namespace epg
