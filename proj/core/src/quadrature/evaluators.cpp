#include "epg/quadrature/evaluators.hpp"

#include <cmath>
#include <functional>

#include "epg/quadrature/rules.hpp"

namespace epg {

namespace {

GradientEstimate analytic(const ParamLayout& layout, Vector flat, const char* name) {
  GradientEstimate g(layout, std::move(flat), name);
  g.sample_variance = 0.0;
  return g;
}

// Running mean and per-component variance (Welford).
class MomentAccumulator {
 public:
  explicit MomentAccumulator(int dim) : mean_(Vector::Zero(dim)), m2_(Vector::Zero(dim)) {}

  void add(const Vector& x) {
    ++n_;
    const Vector delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta.cwiseProduct(x - mean_);
  }

  void finish(GradientEstimate& g) const {
    g.flat() = mean_;
    g.sample_count = n_;
    const Vector var = n_ > 1 ? Vector(m2_ / static_cast<double>(n_ - 1)) : Vector(Vector::Zero(mean_.size()));
    g.sample_variance = var.sum();
    g.standard_error = (var / static_cast<double>(n_)).cwiseSqrt();
  }

 private:
  long n_ = 0;
  Vector mean_;
  Vector m2_;
};

// Q(., s) with the per-state coefficients extracted once.
std::function<double(const Vector&)> action_value(const Critic& critic, const State& s) {
  if (auto q = critic.quadric(s)) return [q = *q](const Vector& a) { return q.eval(a); };
  if (auto p = critic.polynomial(s)) return [p = *p](const Vector& a) { return p.eval(a); };
  return [&critic, s](const Vector& a) { return critic.value(s, a); };
}

}  // namespace

GradientEstimate integrate_gaussian_quadric(const GaussianPolicy& policy, const QuadricCoeffs& q, const State& s) {
  const int d = policy.action_dim();
  if (q.B.size() != d) throw ConfigError("integrate_gaussian_quadric: critic dimension mismatch");
  const Vector mu = policy.mu(s);
  const Matrix l = policy.cov_factor(s);
  check_cov_factor(l);
  const Vector g_mu = 2.0 * q.A * mu + q.B;
  const Matrix g_l = 2.0 * q.A * l;
  Vector flat = policy.mu_jacobian(s).transpose() * g_mu +
                policy.cov_factor_jacobian(s).transpose() * Eigen::Map<const Vector>(g_l.data(), d * d);
  return analytic(policy.layout(), std::move(flat), "gaussian_quadric");
}

GradientEstimate integrate_gaussian_quadric(const GaussianPolicy& policy, const Critic& critic, const State& s) {
  auto q = critic.quadric(s);
  if (!q) {
    throw ConfigError("integrate_gaussian_quadric: critic '" + critic.class_name() +
                      "' is not quadric in the action; use integrate_gaussian_general");
  }
  return integrate_gaussian_quadric(policy, *q, s);
}

GradientEstimate integrate_gaussian_general(const GaussianPolicy& policy, const Critic& critic, const State& s,
                                            const FitConfig& fit) {
  const LocalQuadricFit local = fit_local_quadric(critic, s, policy.mu(s), fit);
  GradientEstimate g = integrate_gaussian_quadric(policy, local.coeffs, s);
  g.estimator = "gaussian_general";
  g.diagnostics["fit_residual_rms"] = local.residual_rms;
  return g;
}

GradientEstimate integrate_expfam_polynomial(const ExpFamilyPolicy& policy, const Critic& critic, const State& s) {
  auto q = critic.polynomial(s);
  if (!q) {
    throw ConfigError("integrate_expfam_polynomial: critic '" + critic.class_name() + "' is not polynomial");
  }
  const auto& stats = policy.sufficient_stats();
  const int needed = policy.stats_degree() + q->degree();
  MomentVector m(policy.action_dim(), 0);
  try {
    m = policy.moments(s, needed);
  } catch (const ConfigError& e) {
    throw ConfigError("integrate_expfam_polynomial: moments up to degree " + std::to_string(needed) +
                      " are required but unsupported (" + e.what() + ")");
  }
  Vector e_tq(stats.size());
  for (std::size_t k = 0; k < stats.size(); ++k) e_tq(static_cast<int>(k)) = m.expect(poly_mul(stats[k], *q));
  const double e_q = m.expect(*q);
  Vector flat = policy.natural_params_jacobian(s).transpose() * e_tq - policy.log_partition_gradient(s) * e_q;
  GradientEstimate g = analytic(policy.layout(), std::move(flat), "expfam_polynomial");
  g.warning = m.warning;
  if (m.error_estimate > 0.0) g.diagnostics["moment_error_estimate"] = m.error_estimate;
  return g;
}

GradientEstimate integrate_expfam_polynomial(const GaussianPolicy& policy, const Critic& critic, const State& s) {
  return integrate_expfam_polynomial(GaussianExpFamily(policy), critic, s);
}

GradientEstimate integrate_reparameterised(const SquashedPolicy& policy, const Critic& critic_b, const State& s,
                                           CriticCoordinates coords) {
  if (coords == CriticCoordinates::post_squash) {
    throw ConfigError(
        "integrate_reparameterised: the critic must be expressed in pre-squash coordinates Q_b(b) = Q(g(b))");
  }
  if (critic_b.action_dim() != policy.action_dim()) {
    throw ConfigError("integrate_reparameterised: critic dimension mismatch");
  }
  GradientEstimate g;
  if (critic_b.quadric(s)) {
    g = integrate_gaussian_quadric(policy.base(), critic_b, s);
  } else if (critic_b.polynomial(s)) {
    g = integrate_expfam_polynomial(policy.base(), critic_b, s);
  } else {
    throw ConfigError("integrate_reparameterised: the pre-squash critic must be quadric or polynomial");
  }
  g.estimator = "reparameterised";
  return g;
}

GradientEstimate integrate_linear(const Policy& policy, const Critic& critic, const State& s) {
  auto a_s = critic.linear(s);
  if (!a_s) throw ConfigError("integrate_linear: critic '" + critic.class_name() + "' is not linear in the action");
  if (a_s->size() != policy.action_dim()) throw ConfigError("integrate_linear: critic dimension mismatch");
  return analytic(policy.layout(), policy.mean_jacobian(s).transpose() * *a_s, "linear");
}

GradientEstimate integrate_discrete(const SoftmaxPolicy& policy, const DiscreteCritic& critic, const State& s,
                                    double baseline) {
  if (critic.n_actions() != policy.n_actions()) throw ConfigError("integrate_discrete: action count mismatch");
  const Vector p = policy.probs(s);
  const Vector q = critic.action_values(s).array() + baseline;
  // sum_a p_a (e_a - p) q_a in logit space
  const Vector dz = p.cwiseProduct(q) - p * p.dot(q);
  return analytic(policy.layout(), policy.logits_jacobian(s).transpose() * dz, "exact_sum");
}

GradientEstimate integrate_monte_carlo(const Policy& policy, const Critic& critic, const State& s, long n,
                                       const Baseline& baseline, std::uint64_t seed) {
  if (n < 1) throw ConfigError("integrate_monte_carlo: n must be >= 1");
  if (critic.action_dim() != policy.action_dim()) throw ConfigError("integrate_monte_carlo: dimension mismatch");
  const double b = baseline ? baseline(s) : 0.0;
  Rng rng = make_rng(seed);
  MomentAccumulator acc(policy.n_params());

  const GaussianPolicy* gauss = dynamic_cast<const GaussianPolicy*>(&policy);
  const auto* squashed = dynamic_cast<const SquashedPolicy*>(&policy);
  if (squashed != nullptr) gauss = &squashed->base();
  if (gauss != nullptr) {
    // score of the base Gaussian at the pre-action; the squash Jacobian
    // does not depend on theta
    const GaussianScore score(*gauss, s);
    const Vector mu = score.mu();
    const Matrix& l = score.cov_factor();
    const auto q = action_value(critic, s);
    for (long i = 0; i < n; ++i) {
      const Vector pre = mu + l * standard_normal(policy.action_dim(), rng);
      const Vector a = squashed != nullptr ? squash(squashed->squash_map(), pre) : pre;
      acc.add(score.score(pre) * (q(a) + b));
    }
  } else {
    for (long i = 0; i < n; ++i) {
      const ActionSample a = policy.sample(s, rng);
      acc.add(policy.grad_log_prob(s, a.action).flat() * (critic.value(s, a.action) + b));
    }
  }
  GradientEstimate g = GradientEstimate::zeros(policy.layout(), "monte_carlo");
  acc.finish(g);
  return g;
}

GradientEstimate integrate_monte_carlo(const SoftmaxPolicy& policy, const DiscreteCritic& critic, const State& s,
                                       long n, const Baseline& baseline, std::uint64_t seed) {
  if (n < 1) throw ConfigError("integrate_monte_carlo: n must be >= 1");
  const double b = baseline ? baseline(s) : 0.0;
  const Vector q = critic.action_values(s);
  const Vector p = policy.probs(s);
  const Matrix jt = policy.logits_jacobian(s).transpose();
  Rng rng = make_rng(seed);
  MomentAccumulator acc(policy.n_params());
  for (long i = 0; i < n; ++i) {
    const int a = policy.sample(s, rng);
    Vector e = -p;
    e(a) += 1.0;
    acc.add(jt * e * (q(a) + b));
  }
  GradientEstimate g = GradientEstimate::zeros(policy.layout(), "monte_carlo");
  acc.finish(g);
  return g;
}

GradientEstimate integrate_dirac(const DiracPolicy& policy, const Critic& critic, const State& s, const FitConfig& fit) {
  if (critic.action_dim() != policy.action_dim()) throw ConfigError("integrate_dirac: dimension mismatch");
  const Vector a = policy.action(s);
  Vector grad;
  if (auto lin = critic.linear(s)) {
    grad = *lin;
  } else if (auto q = critic.quadric(s)) {
    grad = q->gradient(a);
  } else if (auto p = critic.polynomial(s)) {
    grad = p->gradient(a);
  } else {
    grad = fit_local_quadric(critic, s, a, fit).gradient_at(a);
  }
  return analytic(policy.layout(), policy.action_jacobian(s).transpose() * grad, "dirac");
}

std::vector<Interval> gaussian_bounds(const GaussianPolicy& policy, const State& s, double width) {
  const Vector mu = policy.mu(s);
  const Matrix cov = policy.covariance(s);
  std::vector<Interval> out;
  for (int i = 0; i < mu.size(); ++i) {
    const double sd = std::sqrt(cov(i, i));
    out.push_back({mu(i) - width * sd, mu(i) + width * sd});
  }
  return out;
}

namespace {

// Upper bound on the Gaussian mass outside the box (union bound over the
// marginals).
double gaussian_outside_mass(const GaussianPolicy& g, const State& s, const std::vector<Interval>& bounds) {
  const Vector mu = g.mu(s);
  const Matrix cov = g.covariance(s);
  double mass = 0.0;
  for (int i = 0; i < mu.size(); ++i) {
    const double sd = std::sqrt(cov(i, i));
    mass += normal_cdf((bounds[i].lo - mu(i)) / sd) + normal_cdf((mu(i) - bounds[i].hi) / sd);
  }
  return mass;
}

std::string suggest_wider(const std::vector<Interval>& bounds) {
  std::string out;
  for (const auto& b : bounds) {
    const double mid = 0.5 * (b.lo + b.hi);
    const double half = b.hi - b.lo;
    out += " [" + std::to_string(mid - half) + ", " + std::to_string(mid + half) + "]";
  }
  return out;
}

}  // namespace

GradientEstimate integrate_gauss_legendre(const Policy& policy, const Critic& critic, const State& s, int order,
                                          const std::vector<Interval>& bounds, int panels) {
  const int d = policy.action_dim();
  if (d > 3) throw ConfigError("integrate_gauss_legendre: tensor-product rule limited to d <= 3");
  if (static_cast<int>(bounds.size()) != d) throw ConfigError("integrate_gauss_legendre: one interval per dimension");
  if (critic.action_dim() != d) throw ConfigError("integrate_gauss_legendre: critic dimension mismatch");

  const GaussianPolicy* gauss = dynamic_cast<const GaussianPolicy*>(&policy);
  if (gauss != nullptr && gaussian_outside_mass(*gauss, s, bounds) > kMaxOutsideMass) {
    throw AccuracyError("integrate_gauss_legendre: bounds miss more than 1e-8 of the policy mass; try" +
                        suggest_wider(bounds));
  }

  std::vector<QuadratureRule> rules;
  for (const auto& b : bounds) rules.push_back(composite_gauss_legendre(order, panels, b.lo, b.hi));
  const int m = order * panels;

  std::optional<GaussianScore> fast;
  if (gauss != nullptr) fast.emplace(*gauss, s);
  const auto q = action_value(critic, s);

  Vector total = Vector::Zero(policy.n_params());
  double mass = 0.0;
  std::vector<int> idx(d, 0);
  Vector a(d);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      a(i) = rules[i].nodes(idx[i]);
      w *= rules[i].weights(idx[i]);
    }
    double logp = 0.0;
    bool inside = true;
    try {
      logp = fast ? fast->log_prob(a) : policy.log_prob(s, a);
    } catch (const DomainError&) {
      inside = false;
    }
    if (inside) {
      const double p = std::exp(logp);
      if (p > 0.0) {
        mass += w * p;
        const Vector score = fast ? fast->score(a) : policy.grad_log_prob(s, a).flat();
        total += (w * p * q(a)) * score;
      }
    }
    int k = 0;
    while (k < d && ++idx[k] == m) idx[k++] = 0;
    if (k == d) break;
  }
  if (gauss == nullptr && 1.0 - mass > kMaxOutsideMass) {
    throw AccuracyError("integrate_gauss_legendre: quadrature captures only " + std::to_string(mass) +
                        " of the policy mass; widen the bounds (try" + suggest_wider(bounds) +
                        ") or raise the order");
  }
  GradientEstimate g = analytic(policy.layout(), total, "gauss_legendre");
  g.diagnostics["captured_mass"] = mass;
  return g;
}

}  // namespace epg
