#pragma once

#include <vector>

#include "epg/gradient.hpp"
#include "epg/policies/softmax.hpp"

namespace epg {

struct TabularMDP {
  int n_states = 1;
  int n_actions = 1;
  // transition[s](a, s') = p(s' | s, a)
  std::vector<Matrix> transition;
  // reward(s, a)
  Matrix reward;
  Vector initial;
  double gamma = 0.9;

  // Throws ConfigError when an invariant is violated.
  void validate() const;

  // Policy-marginalised quantities for an S x A table of probabilities.
  Matrix policy_transition(const Matrix& pi) const;
  Vector policy_reward(const Matrix& pi) const;
};

// Dirichlet(1) transition rows and initial distribution, uniform rewards in [-1, 1].
TabularMDP random_tabular_mdp(int n_states, int n_actions, double gamma, std::uint64_t seed);

struct MRP {
  Matrix transition;
  Vector reward_mean;
  Vector reward_var;
  Vector initial;
  double gamma = 0.9;

  int n_states() const { return static_cast<int>(reward_mean.size()); }
  void validate() const;
};

MRP random_mrp(int n_states, double gamma, std::uint64_t seed);

// The MRP induced by following pi, with deterministic rewards.
MRP induced_mrp(const TabularMDP& mdp, const Matrix& pi);

struct OccupancyVector {
  Vector rho;
};

OccupancyVector discounted_occupancy(const TabularMDP& mdp, const Matrix& pi);
OccupancyVector discounted_occupancy(const TabularMDP& mdp, const SoftmaxPolicy& policy);

// sum_s rho(s) f(s)
double occupancy_expectation(const TabularMDP& mdp, const Matrix& pi, const Vector& f);
double occupancy_expectation(const TabularMDP& mdp, const SoftmaxPolicy& policy, const Vector& f);

// |gamma rho^T P_pi f - (rho^T f - p0^T f)|
double eigenfunction_residual(const TabularMDP& mdp, const Matrix& pi, const Vector& f);
double eigenfunction_residual(const TabularMDP& mdp, const SoftmaxPolicy& policy, const Vector& f);

// V = (I - gamma P)^-1 u
Vector mrp_value(const MRP& mrp);
// S = u2 + gamma^2 P S with u2 = v + m^2 + 2 gamma m (P V)
Vector mrp_second_moment(const MRP& mrp);

// Second moment of sum_t gamma^t x(s_t, a_t) when x depends on the action and
// the action also drives the transition:
//   S = u2 + gamma^2 P_pi S,
//   u2(s) = E_a[x^2] + 2 gamma E_a[x sum_s' p(s'|s,a) W(s')],
// where W is the value of the reward x. Returns (W, S).
std::pair<Vector, Vector> mdp_reward_moments(const TabularMDP& mdp, const Matrix& pi, const Matrix& x);

Vector policy_values(const TabularMDP& mdp, const Matrix& pi);
Matrix action_values(const TabularMDP& mdp, const Matrix& pi);
double expected_return(const TabularMDP& mdp, const Matrix& pi);
double expected_return(const TabularMDP& mdp, const SoftmaxPolicy& policy);

// Central differences of J in each policy parameter.
GradientEstimate finite_difference_grad_J(const TabularMDP& mdp, const SoftmaxPolicy& policy, double epsilon);

}  // namespace epg
