#include "epg/quadrature/expectation.hpp"

#include <functional>

#include "epg/policies/dirac.hpp"
#include "epg/policies/expfam.hpp"
#include "epg/policies/squashed.hpp"
#include "epg/quadrature/rules.hpp"

namespace epg {

namespace {

double gaussian_closed_form(const GaussianPolicy& g, const Critic& critic, const State& s, bool& ok) {
  ok = true;
  if (auto q = critic.quadric(s)) {
    const Vector mu = g.mu(s);
    const Matrix cov = g.covariance(s);
    return mu.dot(q->A * mu) + (q->A * cov).trace() + q->B.dot(mu) + q->c;
  }
  if (auto p = critic.polynomial(s)) {
    return gaussian_moments(g.mu(s), g.covariance(s), p->degree()).expect(*p);
  }
  ok = false;
  return 0.0;
}

// E[f(mu + L z)] with a tensor-product Gauss-Hermite rule.
double hermite_expectation(const GaussianPolicy& g, const State& s, int order,
                           const std::function<double(const Vector&)>& f) {
  const int d = g.action_dim();
  const QuadratureRule rule = gauss_hermite(order);
  const Vector mu = g.mu(s);
  const Matrix l = g.cov_factor(s);
  std::vector<int> idx(d, 0);
  Vector z(d);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      z(i) = rule.nodes(idx[i]);
      w *= rule.weights(idx[i]);
    }
    total += w * f(mu + l * z);
    int k = 0;
    while (k < d && ++idx[k] == order) idx[k++] = 0;
    if (k == d) break;
  }
  return total;
}

[[noreturn]] void no_path(const Policy& policy, const Critic& critic) {
  throw ConfigError("expected_value: no closed form for policy '" + policy.class_name() + "' with critic '" +
                    critic.class_name() + "' and no quadrature configured (set hermite_order)");
}

}  // namespace

double expected_value(const Policy& policy, const Critic& critic, const State& s, const ExpectationOptions& options) {
  if (policy.action_dim() != critic.action_dim()) throw ConfigError("expected_value: action dimension mismatch");

  if (const auto* dirac = dynamic_cast<const DiracPolicy*>(&policy)) {
    return critic.value(s, dirac->action(s));
  }
  const GaussianPolicy* gauss = dynamic_cast<const GaussianPolicy*>(&policy);
  if (const auto* adapter = dynamic_cast<const GaussianExpFamily*>(&policy)) gauss = &adapter->base();
  if (gauss != nullptr) {
    bool ok = false;
    const double v = gaussian_closed_form(*gauss, critic, s, ok);
    if (ok) return v;
    if (options.hermite_order > 0) {
      return hermite_expectation(*gauss, s, options.hermite_order, [&](const Vector& a) { return critic.value(s, a); });
    }
    no_path(policy, critic);
  }
  if (const auto* ef = dynamic_cast<const ExpFamilyPolicy*>(&policy)) {
    if (auto p = critic.polynomial(s)) return ef->moments(s, p->degree()).expect(*p);
    no_path(policy, critic);
  }
  if (const auto* sq = dynamic_cast<const SquashedPolicy*>(&policy)) {
    if (sq->squash_map() == Squash::identity) return expected_value(sq->base(), critic, s, options);
    if (options.hermite_order > 0) {
      const Squash g = sq->squash_map();
      return hermite_expectation(sq->base(), s, options.hermite_order,
                                 [&](const Vector& b) { return critic.value(s, squash(g, b)); });
    }
    no_path(policy, critic);
  }
  if (const auto* clipped = dynamic_cast<const ClippedPolicy*>(&policy)) {
    if (options.hermite_order > 0) {
      return hermite_expectation(clipped->base(), s, options.hermite_order,
                                 [&](const Vector& b) { return critic.value(s, ClippedPolicy::clip(b)); });
    }
    no_path(policy, critic);
  }
  no_path(policy, critic);
}

double expected_value(const SoftmaxPolicy& policy, const DiscreteCritic& critic, const State& s) {
  if (policy.n_actions() != critic.n_actions()) throw ConfigError("expected_value: action count mismatch");
  return policy.probs(s).dot(critic.action_values(s));
}

}  // namespace epg
