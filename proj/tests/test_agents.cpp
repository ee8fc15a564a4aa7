#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "epg/agents/checks.hpp"
#include "epg/agents/runs.hpp"
#include "epg/agents/variance.hpp"
#include "support.hpp"

using namespace epg;
using nlohmann::json;

namespace {

json one_state_mdp(int n_actions = 2) {
  json tr = json::array();
  json row = json::array();
  for (int a = 0; a < n_actions; ++a) row.push_back({1.0});
  tr.push_back(row);
  json reward = json::array({json::array()});
  for (int a = 0; a < n_actions; ++a) reward[0].push_back(a == 0 ? 1.0 : 0.0);
  return {{"type", "tabular"}, {"transition", tr}, {"reward", reward}, {"initial", {1.0}}, {"gamma", 0.9}};
}

json greedy_config() {
  return {{"algorithm", "epg"},
          {"env", one_state_mdp()},
          {"policy", {{"class", "softmax"}, {"logits_map", {{"kind", "tabular"}, {"n_states", 1}, {"out", 2}}}}},
          {"critic", {{"class", "tabular_q"}, {"table", {{1.0, 0.0}}}}},
          {"actor_lr", 0.1},
          {"critic_lr", 0.0},
          {"horizon", 1},
          {"total_steps", 10000},
          {"eval_every", 1000},
          {"seed", 5}};
}

json bandit_config(double peak) {
  json j = json::parse(R"({
    "algorithm": "clipped",
    "policy": {"class": "clipped",
               "base": {"class": "gaussian", "mean": [0.2], "cov_factor": [[0.2]], "covariance_mode": "hessian-derived"}},
    "critic": {"class": "quadric", "A": [[0.0]], "B": [0.0], "c": 0.0},
    "estimator": "gaussian_quadric", "sigma0": 0.2, "c": 0.25, "actor_lr": 0.005,
    "critic_learner": "rls", "horizon": 1, "total_steps": 10000, "eval_every": 500, "seed": 2})");
  j["env"] = {{"type", "bandit"}, {"peak", {peak}}};
  return j;
}

json lqr_config(double critic_curvature) {
  json j = json::parse(R"({
    "algorithm": "gpg",
    "env": {"type": "lqr", "F": [[1.0]], "G": [[1.0]], "Qc": [[-1.0]], "Rc": [[-1.0]],
            "noise_cov": [[1e-4]], "initial_mean": [1.0], "initial_cov": [[0.0]]},
    "gamma": 0.9, "horizon": 50, "seed": 3,
    "policy": {"class": "gaussian", "mean": [0.0], "cov_factor": [[0.2]]},
    "estimator": "gaussian_quadric", "sigma0": 0.2, "c": 0.25, "actor_lr": 0.01, "critic_lr": 0.0,
    "total_steps": 30, "eval_every": 10, "eval_episodes": 2, "eval_horizon": 20, "trace_limit": 30})");
  j["critic"] = {{"class", "quadric"}, {"A", {{critic_curvature}}}, {"B", {0.5}}, {"c", 0.0}};
  return j;
}

RunConfig parse(const json& j) { return parse_run_config(j.dump()); }

double greedy_prob(const LearningCurve& c) {
  const SoftmaxPolicy pi = SoftmaxPolicy::tabular(1, 2, c.final_params);
  return pi.probs(State::tabular(0))(0);
}

std::vector<Phase> phases_of(const json& j) {
  json k = j;
  k["trace_limit"] = 3;
  k["total_steps"] = 3;
  const LearningCurve c = run(parse(k));
  EXPECT_EQ(c.trace.size(), 3u);
  for (const auto& r : c.trace) EXPECT_EQ(r.phases, c.trace.front().phases);
  return c.trace.front().phases;
}

}  // namespace

TEST(RunLoop, PhaseOrder) {
  using P = Phase;
  EXPECT_EQ(phases_of(greedy_config()),
            (std::vector<P>{P::gradient, P::actor_update, P::act, P::env_step, P::critic_update}));
  json spg = greedy_config();
  spg["algorithm"] = "spg";
  EXPECT_EQ(phases_of(spg), (std::vector<P>{P::act, P::gradient, P::actor_update, P::env_step, P::critic_update}));
  EXPECT_EQ(phases_of(lqr_config(-1.0)),
            (std::vector<P>{P::gradient, P::actor_update, P::covariance, P::act, P::env_step, P::critic_update}));
}

TEST(RunLoop, DeterministicForFixedSeed) {
  for (json j : {greedy_config(), lqr_config(-1.0)}) {
    j["critic_lr"] = 0.1;
    const LearningCurve a = run(parse(j)), b = run(parse(j));
    EXPECT_EQ(a.final_params, b.final_params);
    EXPECT_EQ(a.final_critic_params, b.final_critic_params);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t k = 0; k < a.points.size(); ++k) EXPECT_EQ(a.points[k].eval_return, b.points[k].eval_return);
    j["seed"] = 99;
    EXPECT_NE(run(parse(j)).final_critic_params, a.final_critic_params);
  }
}

TEST(RunLoop, ZeroLearningRateLeavesPolicyUnchanged) {
  for (json j : {greedy_config(), lqr_config(-1.0)}) {
    j["actor_lr"] = 0.0;
    j["critic_lr"] = 0.1;
    const RunConfig c = parse(j);
    const LearningCurve out = run(c);
    const Vector initial = std::visit(
        [](const auto& p) -> Vector {
          if constexpr (std::is_same_v<std::decay_t<decltype(p)>, std::monostate>) {
            return Vector();
          } else {
            return p.params();
          }
        },
        c.policy);
    EXPECT_EQ(out.final_params, initial);
  }
}

TEST(RunLoop, SingleStateMdpBecomesGreedy) {
  const LearningCurve c = run(parse(greedy_config()));
  EXPECT_GE(greedy_prob(c), 0.99);
  EXPECT_EQ(c.points.front().step, 0);
  EXPECT_EQ(c.points.back().step, 10000);
  EXPECT_GT(c.points.back().eval_return, c.points.front().eval_return);
}

TEST(RunLoop, OffPolicyWithTargetBehaviourMatchesOnPolicy) {
  json j = greedy_config();
  j["critic_lr"] = 0.1;
  j["algorithm"] = "offpolicy_epg";
  j["behaviour"] = "target";
  const LearningCurve off = run(parse(j));
  j.erase("behaviour");
  j["algorithm"] = "epg";
  const LearningCurve on = run(parse(j));
  EXPECT_EQ(off.final_params, on.final_params);
  EXPECT_EQ(off.final_critic_params, on.final_critic_params);
}

TEST(RunLoop, OffPolicyUniformBehaviourStillBecomesGreedy) {
  json j = greedy_config();
  j["algorithm"] = "offpolicy_epg";
  j["behaviour"] = {{"class", "softmax"}, {"logits_map", {{"kind", "tabular"}, {"n_states", 1}, {"out", 2}}}};
  EXPECT_GE(greedy_prob(run(parse(j))), 0.99);
}

TEST(RunLoop, ScoreFunctionRunAlsoBecomesGreedy) {
  json j = greedy_config();
  j["algorithm"] = "spg";
  j["total_steps"] = 20000;
  EXPECT_GE(greedy_prob(run(parse(j))), 0.99);
}

TEST(RunLoop, BanditInteriorOptimum) {
  const LearningCurve c = run(parse(bandit_config(0.5)));
  const ClippedPolicy pi(GaussianPolicy::constant(c.final_params.head(1), Matrix::Constant(1, 1, 0.2)));
  EXPECT_NEAR(pi.eval_action(State::continuous(Vector()))(0), 0.5, 0.05);
}

TEST(RunLoop, TinySigmaClippedMatchesUnclipped) {
  json j = bandit_config(0.8);
  j["policy"]["base"] = {{"class", "gaussian"}, {"mean", {0.4}}, {"cov_factor", {{1e-9}}}};
  j["freeze_covariance"] = true;
  j["total_steps"] = 2000;
  const LearningCurve clipped = run(parse(j));
  j["algorithm"] = "epg";
  j["policy"] = j["policy"]["base"];
  const LearningCurve plain = run(parse(j));
  EXPECT_EQ(clipped.final_params, plain.final_params);
  EXPECT_EQ(clipped.final_critic_params, plain.final_critic_params);
}

TEST(RunLoop, HessianCovarianceBounds) {
  const LearningCurve concave = run(parse(lqr_config(-1.0)));
  for (const auto& r : concave.trace) {
    EXPECT_LT(r.sigma, 0.2);
    EXPECT_NEAR(r.sigma, 0.2 * std::exp(0.25 * -2.0), 1e-12);
  }
  const LearningCurve flat = run(parse(lqr_config(0.0)));
  for (const auto& r : flat.trace) EXPECT_NEAR(r.sigma, 0.2, 1e-15);
  EXPECT_EQ(flat.diagnostics.at("fit_fallbacks"), 0.0);
}

TEST(RunLoop, ConfigErrors) {
  json j = greedy_config();
  j["actor_rate"] = 0.1;
  EXPECT_THROW(parse(j), ConfigError);
  EXPECT_THROW(parse_run_config("{not json"), ConfigError);
  j = greedy_config();
  j["estimator"] = "gaussian_quadric";
  EXPECT_THROW(run(parse(j)), ConfigError);
  j = greedy_config();
  j["algorithm"] = "sideways";
  EXPECT_THROW(parse(j), ConfigError);
}

TEST(RunLoop, ConfigDumpRoundTrip) {
  for (const char* name : {"lqr_gpg.json", "bandit_clipped.json", "tabular_epg.json", "variance_tabular.json"}) {
    const RunConfig c = load_run_config(std::string(EPG_CONFIG_DIR) + "/" + name);
    const std::string once = dump_run_config(c);
    EXPECT_EQ(dump_run_config(parse_run_config(once)), once) << name;
  }
}

TEST(Serialization, PolicyAndCriticRoundTrip) {
  Rng rng = make_rng(4);
  const std::vector<PolicySpec> policies = {
      SoftmaxPolicy::tabular(2, 3, test::uniform_vector(rng, 6, -1, 1)),
      GaussianPolicy(LinearMap::affine(2, 1), LinearMap::constant(1), test::uniform_vector(rng, 4, 0.1, 1)),
      DiracPolicy(LinearMap::affine(1, 1), test::uniform_vector(rng, 2, -1, 1)),
      SquashedPolicy(GaussianPolicy::constant(Vector::Constant(1, 0.3), Matrix::Constant(1, 1, 0.4)), Squash::sigmoid)};
  for (const auto& p : policies) {
    const std::string text = serialize_policy(p);
    EXPECT_EQ(serialize_policy(deserialize_policy(text)), text);
  }
  const std::vector<CriticSpec> critics = {
      TabularQCritic(Matrix::NullaryExpr(2, 2, [&] { return test::uniform(rng, -1, 1); })),
      QuadricCritic::constant(Matrix::Constant(1, 1, -0.5), Vector::Constant(1, 0.2), 1.5)};
  for (const auto& c : critics) {
    const std::string text = serialize_critic(c);
    EXPECT_EQ(serialize_critic(deserialize_critic(text)), text);
  }
  EXPECT_THROW(deserialize_policy(R"({"class": "beta"})"), ConfigError);
}

TEST(Checks, GaussianDiracEquivalence) {
  Rng rng = make_rng(5);
  const LinearMap mm = LinearMap::affine(2, 2);
  Vector theta(mm.n_params() + 4);
  theta.head(mm.n_params()) = test::uniform_vector(rng, mm.n_params(), -1, 1);
  theta.tail(4) << 0.5, 0.1, -0.1, 0.7;
  const GaussianPolicy g(mm, LinearMap::constant(4), theta);
  const DiracPolicy d(mm, theta.head(mm.n_params()));
  const QuadricCritic q(LinearMap::affine(2, 4), LinearMap::affine(2, 2), LinearMap::affine(2, 1),
                        test::uniform_vector(rng, 21, -1, 1));
  std::vector<State> states;
  for (int k = 0; k < 20; ++k) states.push_back(State::continuous(test::uniform_vector(rng, 2, -2, 2)));
  EXPECT_LE(equivalence_check_gpg_dpg(g, d, q, states), 1e-10);
  EXPECT_THROW(equivalence_check_gpg_dpg(g, DiracPolicy(mm, Vector::Zero(mm.n_params())), q, states), ConfigError);
  EXPECT_THROW(equivalence_check_gpg_dpg(g, DiracPolicy(LinearMap::quadratic(2, 2), Vector::Zero(12)), q, states),
               ConfigError);
}

TEST(Checks, LockstepTrajectoriesCoincide) {
  Rng rng = make_rng(6);
  const GaussianPolicy g = GaussianPolicy::constant(Vector::Constant(1, 0.2), Matrix::Constant(1, 1, 0.5));
  const DiracPolicy d(LinearMap::constant(1), Vector::Constant(1, 0.2));
  std::vector<QuadricCritic> critics;
  std::vector<State> states;
  for (int k = 0; k < 100; ++k) {
    critics.push_back(QuadricCritic::constant(Matrix::Constant(1, 1, test::uniform(rng, -1, 0)),
                                              Vector::Constant(1, test::uniform(rng, -1, 1)), 0.0));
    states.emplace_back(State::continuous(Vector()));
  }
  const LockstepResult r = lockstep_gpg_dpg(g, d, critics, states, 0.05);
  EXPECT_LE(r.max_param_deviation, 1e-8);
  EXPECT_NE(r.dirac_params(0), 0.2);
  EXPECT_THROW(lockstep_gpg_dpg(g, d, critics, {}, 0.05), ConfigError);
}

TEST(Checks, EntropyIdentity) {
  Rng rng = make_rng(7);
  std::vector<State> states;
  for (int s = 0; s < 3; ++s) states.push_back(State::tabular(s));
  for (double alpha : {0.0, 0.3, 1.0}) {
    const SoftmaxPolicy pi = SoftmaxPolicy::tabular(3, 4, test::uniform_vector(rng, 12, -2, 2), true);
    EXPECT_LE(entropy_identity_check(pi, alpha, states), 1e-10) << alpha;
  }
  EXPECT_THROW(entropy_identity_check(SoftmaxPolicy::tabular(3, 4, Vector::Zero(12)), 0.5, states), ConfigError);
}

TEST(Variance, RejectsTooFewTrajectories) {
  const RunConfig c = load_run_config(std::string(EPG_CONFIG_DIR) + "/variance_tabular.json");
  EXPECT_THROW(variance_harness(c, {{TrajectoryEstimator::epg, BaselineKind::none}}, 29), ConfigError);
  EXPECT_THROW(variance_harness(c, {}, 100), ConfigError);
}

TEST(Variance, SingleActionHasZeroVariance) {
  json j = greedy_config();
  j["env"] = one_state_mdp(1);
  j["policy"]["logits_map"]["out"] = 1;
  j["critic"]["table"] = {{2.0}};
  const VarianceReport r = variance_harness(
      parse(j), {{TrajectoryEstimator::spg, BaselineKind::none}, {TrajectoryEstimator::epg, BaselineKind::none}}, 50);
  for (const auto& e : r.entries) {
    EXPECT_EQ(e.cov_trace, 0.0);
    EXPECT_EQ(e.mean_norm, 0.0);
  }
}

TEST(Variance, ExpectedEstimatorBeatsScoreFunction) {
  const RunConfig c = load_run_config(std::string(EPG_CONFIG_DIR) + "/variance_tabular.json");
  const VarianceReport r = variance_harness(
      c, {{TrajectoryEstimator::epg, BaselineKind::none}, {TrajectoryEstimator::spg, BaselineKind::none}}, 2000);
  EXPECT_EQ(r.prediction_method, "mrp");
  EXPECT_LE(r.max_mean_gap_se, 4.0);
  ASSERT_EQ(r.comparisons.size(), 1u);
  EXPECT_LT(r.comparisons[0].difference + 5.0 * r.comparisons[0].se, 0.0);
  for (const auto& e : r.entries) {
    EXPECT_LE(std::abs(e.second_moment - e.predicted_second_moment), 4.0 * e.second_moment_se) << e.estimator;
  }
}
