#pragma once

#include "epg/critics/critic.hpp"
#include "epg/critics/tabular.hpp"
#include "epg/quadrature/expectation.hpp"

namespace epg {

struct Transition {
  State s;
  Vector a;
  double r = 0.0;
  State s_next;
  Vector a_next;  // used by sarsa only
  bool terminal = false;
};

struct DiscreteTransition {
  int s = 0;
  int a = 0;
  double r = 0.0;
  int s_next = 0;
  int a_next = -1;  // used by sarsa only
  bool terminal = false;
};

// Each update mutates the critic in place and returns the TD error.

double sarsa_update(ParametricCritic& critic, const Transition& t, double alpha, double gamma);
double sarsa_update(TabularQCritic& critic, const DiscreteTransition& t, double alpha, double gamma);

double expected_sarsa_update(ParametricCritic& critic, const Transition& t, const Policy& policy, double alpha,
                             double gamma, const ExpectationOptions& options = {});
double expected_sarsa_update(TabularQCritic& critic, const DiscreteTransition& t, const SoftmaxPolicy& policy,
                             double alpha, double gamma);

// r + gamma V(s') - V(s), with V(s') = 0 for terminal transitions.
double td_advantage(const ValueFunction& v, const State& s, double r, const State& s_next, double gamma,
                    bool terminal = false);
double td0_update(ValueFunction& v, const State& s, double r, const State& s_next, double alpha, double gamma,
                  bool terminal = false);

// Recursive least squares on the critic's parameter gradient features,
// regressing Q(s, a) onto the expected-sarsa target.
class RlsLearner {
 public:
  RlsLearner(int n_params, double forgetting, double initial_scale);

  double forgetting() const { return forgetting_; }
  const Matrix& precision_inverse() const { return p_; }

  double update(ParametricCritic& critic, const State& s, const Vector& a, double target);
  double expected_sarsa_update(ParametricCritic& critic, const Transition& t, const Policy& policy, double gamma,
                               const ExpectationOptions& options = {});

 private:
  double forgetting_;
  Matrix p_;
};

}  // namespace epg
