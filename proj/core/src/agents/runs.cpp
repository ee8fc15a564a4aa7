#include "epg/agents/runs.hpp"

#include <cmath>
#include <limits>

#include "epg/critics/learners.hpp"
#include "epg/quadrature/evaluators.hpp"
#include "internal.hpp"

namespace epg {

const char* to_string(Phase p) {
  switch (p) {
    case Phase::gradient: return "gradient";
    case Phase::actor_update: return "actor_update";
    case Phase::covariance: return "covariance";
    case Phase::act: return "act";
    case Phase::env_step: return "env_step";
    case Phase::critic_update: return "critic_update";
  }
  return "?";
}

namespace {

constexpr std::uint64_t kEvalTag = 0xE7A10000ULL;
constexpr std::uint64_t kEstimatorTag = 0x5A3B0000ULL;
constexpr std::uint64_t kFitTag = 0xF1700000ULL;

class Optimiser {
 public:
  Optimiser(OptimiserKind kind, double lr, int n) : kind_(kind), lr_(lr), m_(Vector::Zero(n)), v_(Vector::Zero(n)) {}

  // Ascent step for gradient g.
  Vector step(const Vector& g) {
    if (kind_ == OptimiserKind::sgd) return lr_ * g;
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t_;
    m_ = b1 * m_ + (1.0 - b1) * g;
    v_ = b2 * v_ + (1.0 - b2) * g.cwiseAbs2();
    const Vector mhat = m_ / (1.0 - std::pow(b1, static_cast<double>(t_)));
    const Vector vhat = v_ / (1.0 - std::pow(b2, static_cast<double>(t_)));
    return lr_ * mhat.cwiseQuotient((vhat.array().sqrt() + eps).matrix());
  }

 private:
  OptimiserKind kind_;
  double lr_;
  Vector m_;
  Vector v_;
  long t_ = 0;
};

int auto_eval_horizon(const RunConfig& c, double gamma) {
  if (c.eval_horizon > 0) return c.eval_horizon;
  if (gamma <= 0.0) return 1;
  if (gamma >= 1.0) return c.horizon;
  return std::max(1, static_cast<int>(std::ceil(std::log(1e-8) / std::log(gamma))));
}

int sample_index(const Vector& p, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    acc += p(i);
    if (u < acc) return i;
  }
  return static_cast<int>(p.size()) - 1;
}

void mask_covariance(const Policy& policy, Vector& g) {
  for (const auto& b : policy.layout()) {
    if (b.name == "cov") g.segment(b.offset, b.size).setZero();
  }
}

class Recorder {
 public:
  Recorder(LearningCurve& curve, long limit) : curve_(curve), limit_(limit) {}

  void begin(long step) {
    active_ = step < limit_;
    if (active_) {
      curve_.trace.emplace_back();
      curve_.trace.back().step = step;
    }
  }
  void phase(Phase p) {
    if (active_) curve_.trace.back().phases.push_back(p);
  }
  StepRecord* record() { return active_ ? &curve_.trace.back() : nullptr; }

 private:
  LearningCurve& curve_;
  long limit_;
  bool active_ = false;
};

// ---------------------------------------------------------------- discrete

double mean_entropy(const SoftmaxPolicy& pi, int n_states) {
  double h = 0.0;
  for (int s = 0; s < n_states; ++s) h += pi.entropy(State::tabular(s));
  return h / n_states;
}

LearningCurve run_discrete(const RunConfig& cfg) {
  const auto& mdp = std::get<TabularMDP>(cfg.env);
  SoftmaxPolicy pi = std::get<SoftmaxPolicy>(cfg.policy);
  TabularQCritic critic = std::get<TabularQCritic>(cfg.critic);
  const bool offpolicy = cfg.algorithm == Algorithm::offpolicy_epg && !cfg.behaviour_is_target;
  std::optional<SoftmaxPolicy> behaviour;
  if (offpolicy) behaviour = std::get<SoftmaxPolicy>(cfg.behaviour);
  const bool spg = cfg.algorithm == Algorithm::spg;

  LearningCurve curve;
  Recorder rec(curve, cfg.trace_limit);
  Optimiser opt(cfg.optimiser, cfg.actor_lr, pi.n_params());
  Matrix visits = Matrix::Zero(mdp.n_states, mdp.n_actions);
  Rng rng = make_rng(cfg.seed);

  auto baseline = [&](const State& st) -> double {
    switch (cfg.baseline) {
      case BaselineKind::none: return 0.0;
      case BaselineKind::constant: return cfg.baseline_constant;
      case BaselineKind::value: return -expected_value(pi, critic, st);
    }
    return 0.0;
  };
  auto evaluate = [&](long step) {
    curve.points.push_back({step, expected_return(mdp, pi), mean_entropy(pi, mdp.n_states)});
  };

  int s = sample_index(mdp.initial, rng);
  int t = 0;
  evaluate(0);
  for (long step = 0; step < cfg.total_steps; ++step) {
    rec.begin(step);
    const State st = State::tabular(s);
    int a = -1;
    Vector g;
    if (spg) {
      a = behaviour ? behaviour->sample(st, rng) : pi.sample(st, rng);
      rec.phase(Phase::act);
      g = pi.grad_log_prob(st, a).flat() * (critic.value(s, a) + baseline(st));
      rec.phase(Phase::gradient);
    } else {
      if (cfg.estimator == Estimator::monte_carlo) {
        g = integrate_monte_carlo(pi, critic, st, cfg.mc_samples, baseline,
                                  derive_seed(cfg.seed, kEstimatorTag + static_cast<std::uint64_t>(step)))
                .flat();
      } else {
        g = integrate_discrete(pi, critic, st, baseline(st)).flat();
      }
      rec.phase(Phase::gradient);
    }
    const double weight = cfg.discount_gradient ? std::pow(mdp.gamma, t) : 1.0;
    pi.set_params(pi.params() + opt.step(weight * g));
    rec.phase(Phase::actor_update);
    if (!spg) {
      a = behaviour ? behaviour->sample(st, rng) : pi.sample(st, rng);
      rec.phase(Phase::act);
    }
    const double r = mdp.reward(s, a);
    const int s_next = sample_index(mdp.transition[static_cast<std::size_t>(s)].row(a).transpose(), rng);
    rec.phase(Phase::env_step);
    if (auto* sr = rec.record()) {
      sr->sigma = pi.entropy(st);
      sr->mean = pi.probs(st);
      sr->reward = r;
    }

    visits(s, a) += 1.0;
    const double alpha =
        cfg.critic_schedule == StepSizeSchedule::visit_count ? cfg.critic_lr / visits(s, a) : cfg.critic_lr;
    if (alpha > 0.0) {
      DiscreteTransition tr{s, a, r, s_next, -1, false};
      if (cfg.critic_learner == CriticLearner::sarsa) {
        tr.a_next = pi.sample(State::tabular(s_next), rng);
        sarsa_update(critic, tr, alpha, mdp.gamma);
      } else {
        expected_sarsa_update(critic, tr, pi, alpha, mdp.gamma);
      }
    }
    rec.phase(Phase::critic_update);

    s = s_next;
    if (++t >= cfg.horizon) {
      s = sample_index(mdp.initial, rng);
      t = 0;
    }
    if ((step + 1) % cfg.eval_every == 0 || step + 1 == cfg.total_steps) evaluate(step + 1);
  }
  curve.final_params = pi.params();
  curve.final_critic_params = Eigen::Map<const Vector>(critic.table().data(), critic.table().size());
  return curve;
}

// -------------------------------------------------------------- continuous

struct EnvStep {
  double reward = 0.0;
  State next;
  bool terminal = false;
};

class ContinuousEnv {
 public:
  explicit ContinuousEnv(const EnvSpec& spec) {
    if (const auto* l = std::get_if<LQREnv>(&spec)) lqr_ = l;
    if (const auto* b = std::get_if<BoundedBandit>(&spec)) bandit_ = b;
  }

  double gamma() const { return lqr_ ? lqr_->gamma : 0.0; }
  bool is_bandit() const { return bandit_ != nullptr; }

  State reset(Rng& rng) const {
    if (lqr_) return State::continuous(lqr_->reset(rng));
    return State::continuous(Vector());
  }
  EnvStep step(const State& s, const Vector& a, Rng& rng) const {
    if (lqr_) return {lqr_->reward(s.x, a), State::continuous(lqr_->step(s.x, a, rng)), false};
    return {bandit_->reward(a), State::continuous(Vector()), true};
  }

 private:
  const LQREnv* lqr_ = nullptr;
  const BoundedBandit* bandit_ = nullptr;
};

double continuous_sigma(const Policy& policy, const State& s, const OUConfig* ou) {
  if (const auto* g = detail::gaussian_core(policy)) {
    return std::sqrt(g->covariance(s).trace() / g->action_dim());
  }
  if (const auto* q = dynamic_cast<const SquashedPolicy*>(&policy)) {
    return std::sqrt(q->base().covariance(s).trace() / q->action_dim());
  }
  if (dynamic_cast<const DiracPolicy*>(&policy)) {
    if (!ou || !ou->stable()) return std::numeric_limits<double>::infinity();
    return std::sqrt(ou->stationary_variance());
  }
  if (const auto* e = dynamic_cast<const ExpFamilyPolicy*>(&policy)) {
    const MomentVector m = e->moments(s, 2);
    return std::sqrt(std::max(0.0, m.at({2}) - m.at({1}) * m.at({1})));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double baseline_value(const RunConfig& cfg, const Policy& policy, const Critic& critic, const State& s) {
  switch (cfg.baseline) {
    case BaselineKind::none: return 0.0;
    case BaselineKind::constant: return cfg.baseline_constant;
    case BaselineKind::value: return -expected_value(detail::critic_policy(policy), critic, s, cfg.expectation);
  }
  return 0.0;
}

GradientEstimate continuous_gradient(const RunConfig& cfg, const Policy& policy, const Critic& critic,
                                     const State& s, long step) {
  const std::uint64_t seed = derive_seed(cfg.seed, kEstimatorTag + static_cast<std::uint64_t>(step));
  const GaussianPolicy* core = detail::gaussian_core(policy);
  switch (cfg.estimator) {
    case Estimator::gaussian_quadric: return integrate_gaussian_quadric(*core, critic, s);
    case Estimator::gaussian_general: {
      FitConfig fit = cfg.fit;
      fit.seed = derive_seed(cfg.fit.seed, kFitTag + static_cast<std::uint64_t>(step));
      return integrate_gaussian_general(*core, critic, s, fit);
    }
    case Estimator::expfam_polynomial:
      if (core) return integrate_expfam_polynomial(*core, critic, s);
      return integrate_expfam_polynomial(dynamic_cast<const ExpFamilyPolicy&>(policy), critic, s);
    case Estimator::reparameterised:
      return integrate_reparameterised(dynamic_cast<const SquashedPolicy&>(policy), critic, s);
    case Estimator::linear: return integrate_linear(detail::critic_policy(policy), critic, s);
    case Estimator::gauss_legendre:
      return integrate_gauss_legendre(*core, critic, s, cfg.gl_order, gaussian_bounds(*core, s));
    case Estimator::monte_carlo: {
      const Baseline b = [&](const State& st) { return baseline_value(cfg, policy, critic, st); };
      return integrate_monte_carlo(detail::critic_policy(policy), critic, s, cfg.mc_samples, b, seed);
    }
    case Estimator::dirac: {
      FitConfig fit = cfg.fit;
      fit.seed = derive_seed(cfg.fit.seed, kFitTag + static_cast<std::uint64_t>(step));
      return integrate_dirac(dynamic_cast<const DiracPolicy&>(policy), critic, s, fit);
    }
    case Estimator::exact_sum: break;
  }
  throw ConfigError("estimator exact_sum needs a discrete action space");
}

// Hessian-derived covariance factor for the current mean; nullopt on failure.
std::optional<Matrix> exploration_factor(const RunConfig& cfg, const GaussianPolicy& core, const Critic& critic,
                                         const State& s, long step) {
  try {
    HessianEstimate h;
    h.source = cfg.hessian_source;
    std::optional<QuadricCoeffs> q;
    if (cfg.hessian_source == HessianEstimate::Source::analytic) q = critic.quadric(s);
    if (q) {
      h.H = q->hessian();
    } else {
      h.source = HessianEstimate::Source::sigma_point;
      FitConfig fit = cfg.fit;
      fit.seed = derive_seed(cfg.fit.seed, kFitTag + static_cast<std::uint64_t>(step));
      h.H = fit_local_quadric(critic, s, core.mu(s), fit).hessian();
    }
    if (!h.H.allFinite()) return std::nullopt;
    Matrix l = hessian_exploration_cov(h, cfg.exploration);
    if (!l.allFinite()) return std::nullopt;
    check_cov_factor(l);
    return l;
  } catch (const Error&) {
    return std::nullopt;
  }
}

double evaluate_continuous(const RunConfig& cfg, const Policy& policy, std::uint64_t seed) {
  if (const auto* bandit = std::get_if<BoundedBandit>(&cfg.env)) {
    return bandit->reward(policy.eval_action(State::continuous(Vector())));
  }
  const auto& env = std::get<LQREnv>(cfg.env);
  const int horizon = auto_eval_horizon(cfg, env.gamma);
  double total = 0.0;
  for (int e = 0; e < cfg.eval_episodes; ++e) {
    Rng rng = make_rng(derive_seed(seed, kEvalTag + static_cast<std::uint64_t>(e)));
    Vector x = env.reset(rng);
    double ret = 0.0, w = 1.0;
    for (int t = 0; t < horizon; ++t) {
      const Vector a = policy.eval_action(State::continuous(x));
      ret += w * env.reward(x, a);
      x = env.step(x, a, rng);
      w *= env.gamma;
    }
    total += ret;
  }
  return total / cfg.eval_episodes;
}

LearningCurve run_continuous(const RunConfig& cfg) {
  const ContinuousEnv env(cfg.env);
  std::unique_ptr<Policy> policy = detail::make_policy(cfg.policy);
  std::unique_ptr<ParametricCritic> critic = detail::make_critic(cfg.critic);
  std::unique_ptr<Policy> behaviour;
  if (cfg.algorithm == Algorithm::offpolicy_epg && !cfg.behaviour_is_target) {
    behaviour = detail::make_policy(cfg.behaviour);
  }
  const bool spg = cfg.algorithm == Algorithm::spg;
  const bool dpg = cfg.algorithm == Algorithm::dpg;
  GaussianPolicy* core = detail::gaussian_core(*policy);
  if (cfg.algorithm == Algorithm::gpg) core->set_covariance_mode(CovarianceMode::hessian_derived);
  const bool hessian_cov = core && core->covariance_mode() == CovarianceMode::hessian_derived;
  const bool mask_cov = hessian_cov || cfg.freeze_covariance;

  LearningCurve curve;
  curve.diagnostics["fit_fallbacks"] = 0.0;
  Recorder rec(curve, cfg.trace_limit);
  Optimiser opt(cfg.optimiser, cfg.actor_lr, policy->n_params());
  std::optional<RlsLearner> rls;
  if (cfg.critic_learner == CriticLearner::rls) {
    rls.emplace(critic->n_params(), cfg.rls_forgetting, cfg.rls_initial_scale);
  }
  OUConfig ou(cfg.ou_psi, cfg.ou_sigma, policy->action_dim());
  Rng rng = make_rng(cfg.seed);
  const double gamma = env.gamma();
  const std::uint64_t eval_seed = derive_seed(cfg.seed, kEvalTag);

  State s = env.reset(rng);
  State sigma_state = s;
  auto evaluate = [&](long step) {
    curve.points.push_back(
        {step, evaluate_continuous(cfg, *policy, eval_seed), continuous_sigma(*policy, sigma_state, dpg ? &ou : nullptr)});
  };
  int t = 0;
  evaluate(0);
  for (long step = 0; step < cfg.total_steps; ++step) {
    rec.begin(step);
    ActionSample act;
    Vector g;
    if (spg) {
      act = behaviour ? behaviour->sample(s, rng) : policy->sample(s, rng);
      rec.phase(Phase::act);
      const Policy& cp = detail::critic_policy(*policy);
      g = cp.grad_log_prob(s, act.pre_action).flat() *
          (critic->value(s, act.pre_action) + baseline_value(cfg, *policy, *critic, s));
      rec.phase(Phase::gradient);
    } else {
      GradientEstimate ge = continuous_gradient(cfg, *policy, *critic, s, step);
      if (!ge.warning.empty()) curve.events.push_back("step " + std::to_string(step) + ": " + ge.warning);
      g = std::move(ge.flat());
      rec.phase(Phase::gradient);
    }
    if (mask_cov) mask_covariance(*policy, g);
    const double weight = cfg.discount_gradient ? std::pow(gamma, t) : 1.0;
    policy->set_params(policy->params() + opt.step(weight * g));
    rec.phase(Phase::actor_update);

    if (hessian_cov) {
      std::optional<Matrix> l = exploration_factor(cfg, *core, *critic, s, step);
      if (!l) {
        l = cfg.exploration.sigma0 * Matrix::Identity(core->action_dim(), core->action_dim());
        curve.diagnostics["fit_fallbacks"] += 1.0;
        curve.events.push_back("step " + std::to_string(step) + ": Hessian estimate failed, using sigma0 I");
      }
      core->set_covariance_override(*l);
      rec.phase(Phase::covariance);
    }
    if (auto* sr = rec.record()) {
      sr->sigma = continuous_sigma(*policy, s, dpg ? &ou : nullptr);
      sr->mean = core ? core->mu(s) : policy->eval_action(s);
    }

    if (!spg) {
      if (dpg) {
        const Vector a = policy->eval_action(s) + ou_step(ou, rng);
        act = {a, a};
      } else {
        act = behaviour ? behaviour->sample(s, rng) : policy->sample(s, rng);
      }
      rec.phase(Phase::act);
    }
    sigma_state = s;
    const EnvStep es = env.step(s, act.action, rng);
    rec.phase(Phase::env_step);
    if (auto* sr = rec.record()) sr->reward = es.reward;

    Transition tr{s, act.pre_action, es.reward, es.next, Vector(), es.terminal};
    const Policy& target = detail::critic_policy(*policy);
    if (rls) {
      rls->expected_sarsa_update(*critic, tr, target, gamma, cfg.expectation);
    } else if (cfg.critic_lr > 0.0) {
      if (cfg.critic_learner == CriticLearner::sarsa) {
        if (!es.terminal) tr.a_next = dpg ? policy->eval_action(es.next) : target.sample(es.next, rng).pre_action;
        sarsa_update(*critic, tr, cfg.critic_lr, gamma);
      } else {
        expected_sarsa_update(*critic, tr, target, cfg.critic_lr, gamma, cfg.expectation);
      }
    }
    rec.phase(Phase::critic_update);

    s = es.next;
    if (es.terminal || ++t >= cfg.horizon) {
      s = env.reset(rng);
      t = 0;
    }
    if ((step + 1) % cfg.eval_every == 0 || step + 1 == cfg.total_steps) evaluate(step + 1);
  }
  curve.final_params = policy->params();
  curve.final_critic_params = critic->params();
  return curve;
}

LearningCurve dispatch(const RunConfig& cfg) {
  cfg.validate();
  return detail::is_tabular(cfg) ? run_discrete(cfg) : run_continuous(cfg);
}

RunConfig with_algorithm(RunConfig cfg, Algorithm a) {
  cfg.algorithm = a;
  return cfg;
}

}  // namespace

LearningCurve run_epg(const RunConfig& config) { return dispatch(with_algorithm(config, Algorithm::epg)); }
LearningCurve run_gpg(const RunConfig& config) { return dispatch(with_algorithm(config, Algorithm::gpg)); }
LearningCurve run_clipped(const RunConfig& config) { return dispatch(with_algorithm(config, Algorithm::clipped)); }
LearningCurve run_offpolicy_epg(const RunConfig& config) {
  return dispatch(with_algorithm(config, Algorithm::offpolicy_epg));
}
LearningCurve run_spg(const RunConfig& config) { return dispatch(with_algorithm(config, Algorithm::spg)); }
LearningCurve run_dpg(const RunConfig& config) { return dispatch(with_algorithm(config, Algorithm::dpg)); }

LearningCurve run(const RunConfig& config) { return dispatch(config); }

double evaluate_policy(const RunConfig& config, const PolicySpec& policy, std::uint64_t seed) {
  if (const auto* mdp = std::get_if<TabularMDP>(&config.env)) {
    return expected_return(*mdp, std::get<SoftmaxPolicy>(policy));
  }
  return evaluate_continuous(config, *detail::make_policy(policy), derive_seed(seed, kEvalTag));
}

}  // namespace epg
