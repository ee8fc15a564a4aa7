#pragma once

#include <optional>
#include <string>
#include <variant>

#include "epg/critics/critic.hpp"
#include "epg/critics/local_fit.hpp"
#include "epg/critics/tabular.hpp"
#include "epg/env/bandit.hpp"
#include "epg/env/lqr.hpp"
#include "epg/env/tabular.hpp"
#include "epg/exploration/exploration.hpp"
#include "epg/policies/dirac.hpp"
#include "epg/policies/expfam.hpp"
#include "epg/policies/gaussian.hpp"
#include "epg/policies/softmax.hpp"
#include "epg/policies/squashed.hpp"
#include "epg/quadrature/expectation.hpp"

namespace epg {

enum class Algorithm { epg, gpg, clipped, offpolicy_epg, spg, dpg };

enum class Estimator {
  exact_sum,
  gaussian_quadric,
  gaussian_general,
  expfam_polynomial,
  reparameterised,
  linear,
  gauss_legendre,
  monte_carlo,
  dirac,
};

enum class CriticLearner { sarsa, expected_sarsa, rls };
enum class BaselineKind { none, value, constant };
enum class OptimiserKind { sgd, adam };
enum class StepSizeSchedule { constant, visit_count };

using EnvSpec = std::variant<std::monostate, TabularMDP, LQREnv, BoundedBandit>;
using PolicySpec = std::variant<std::monostate, SoftmaxPolicy, GaussianPolicy, DiracPolicy, SquashedPolicy,
                                ClippedPolicy, GammaPolicy, PolyExpPolicy>;
using CriticSpec = std::variant<std::monostate, TabularQCritic, QuadricCritic, PolynomialCritic, LinearCritic>;

struct RunConfig {
  Algorithm algorithm = Algorithm::epg;
  EnvSpec env;
  PolicySpec policy;
  CriticSpec critic;
  // off-policy runs only; behaviour_is_target acts with the target policy itself
  PolicySpec behaviour;
  bool behaviour_is_target = false;
  Estimator estimator = Estimator::exact_sum;

  ExplorationConfig exploration;
  HessianEstimate::Source hessian_source = HessianEstimate::Source::analytic;
  FitConfig fit;
  double ou_psi = 0.0;
  double ou_sigma = 0.1;
  // keep the covariance parameters of a Gaussian-based policy fixed
  bool freeze_covariance = false;

  double actor_lr = 0.01;
  double critic_lr = 0.05;
  StepSizeSchedule critic_schedule = StepSizeSchedule::constant;
  CriticLearner critic_learner = CriticLearner::expected_sarsa;
  double rls_forgetting = 0.99;
  double rls_initial_scale = 100.0;
  OptimiserKind optimiser = OptimiserKind::sgd;
  ExpectationOptions expectation;

  int horizon = 50;
  long total_steps = 1000;
  std::uint64_t seed = 0;
  // weight per-step gradients by gamma^t
  bool discount_gradient = true;
  BaselineKind baseline = BaselineKind::none;
  double baseline_constant = 0.0;
  int gl_order = 32;
  long mc_samples = 1;

  long eval_every = 1000;
  int eval_episodes = 10;
  // 0 picks a horizon where gamma^T < 1e-8
  int eval_horizon = 0;
  // number of leading steps recorded in the step trace
  long trace_limit = 0;

  // Throws ConfigError when the estimator does not fit the policy/critic pair
  // or a required component is missing.
  void validate() const;
};

const char* to_string(Algorithm a);
const char* to_string(Estimator e);
const char* to_string(CriticLearner l);
const char* to_string(BaselineKind b);
Algorithm algorithm_from_string(const std::string& s);
Estimator estimator_from_string(const std::string& s);
CriticLearner critic_learner_from_string(const std::string& s);
BaselineKind baseline_from_string(const std::string& s);

// JSON configuration files (see README for the schema).
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);
std::string dump_run_config(const RunConfig& config);

// Class tag plus parameter arrays.
std::string serialize_policy(const PolicySpec& policy);
PolicySpec deserialize_policy(const std::string& json_text);
std::string serialize_critic(const CriticSpec& critic);
CriticSpec deserialize_critic(const std::string& json_text);

}  // namespace epg
