#include "epg/agents/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "internal.hpp"

namespace epg {

using json = nlohmann::json;

namespace {

template <typename E, std::size_t N>
E enum_from(const std::string& s, const std::pair<E, const char*> (&table)[N], const char* what) {
  for (const auto& [e, name] : table) {
    if (s == name) return e;
  }
  std::string names;
  for (const auto& [e, name] : table) names += std::string(names.empty() ? "" : ", ") + name;
  throw ConfigError(std::string("unknown ") + what + " '" + s + "' (expected one of: " + names + ")");
}

template <typename E, std::size_t N>
const char* enum_to(E e, const std::pair<E, const char*> (&table)[N]) {
  for (const auto& [v, name] : table) {
    if (v == e) return name;
  }
  return "?";
}

const std::pair<Algorithm, const char*> kAlgorithms[] = {
    {Algorithm::epg, "epg"},         {Algorithm::gpg, "gpg"}, {Algorithm::clipped, "clipped"},
    {Algorithm::offpolicy_epg, "offpolicy_epg"}, {Algorithm::spg, "spg"}, {Algorithm::dpg, "dpg"},
};
const std::pair<Estimator, const char*> kEstimators[] = {
    {Estimator::exact_sum, "exact_sum"},
    {Estimator::gaussian_quadric, "gaussian_quadric"},
    {Estimator::gaussian_general, "gaussian_general"},
    {Estimator::expfam_polynomial, "expfam_polynomial"},
    {Estimator::reparameterised, "reparameterised"},
    {Estimator::linear, "linear"},
    {Estimator::gauss_legendre, "gauss_legendre"},
    {Estimator::monte_carlo, "monte_carlo"},
    {Estimator::dirac, "dirac"},
};
const std::pair<CriticLearner, const char*> kLearners[] = {
    {CriticLearner::sarsa, "sarsa"}, {CriticLearner::expected_sarsa, "expected_sarsa"}, {CriticLearner::rls, "rls"}};
const std::pair<BaselineKind, const char*> kBaselines[] = {
    {BaselineKind::none, "none"}, {BaselineKind::value, "value"}, {BaselineKind::constant, "constant"}};
const std::pair<OptimiserKind, const char*> kOptimisers[] = {{OptimiserKind::sgd, "sgd"},
                                                             {OptimiserKind::adam, "adam"}};
const std::pair<StepSizeSchedule, const char*> kSchedules[] = {{StepSizeSchedule::constant, "constant"},
                                                               {StepSizeSchedule::visit_count, "visit_count"}};
const std::pair<HessianEstimate::Source, const char*> kHessianSources[] = {
    {HessianEstimate::Source::analytic, "analytic"}, {HessianEstimate::Source::sigma_point, "sigma_point"}};

// ------------------------------------------------------------ json helpers

Vector to_vector(const json& j, const char* what) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected a number array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string(what) + ": expected a number array");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

// Nested row arrays; a bare number is a 1x1 matrix.
Matrix to_matrix(const json& j, const char* what) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": expected nested arrays");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigError(std::string(what) + ": expected nested arrays");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ConfigError(std::string(what) + ": ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

json from_vector(const Vector& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

json from_matrix(const Matrix& m) {
  json j = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) j.push_back(from_vector(m.row(r).transpose()));
  return j;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
  }
}

const json& need(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw ConfigError(std::string(what) + ": missing key '" + key + "'");
  return j.at(key);
}

LinearMap map_from_json(const json& j) {
  check_keys(j, {"kind", "in", "out", "n_states"}, "linear map");
  const auto kind = linear_map_kind_from_string(need(j, "kind", "linear map").get<std::string>());
  const int out = need(j, "out", "linear map").get<int>();
  switch (kind) {
    case LinearMap::Kind::constant: return LinearMap::constant(out);
    case LinearMap::Kind::tabular: return LinearMap::tabular(need(j, "n_states", "linear map").get<int>(), out);
    case LinearMap::Kind::affine: return LinearMap::affine(need(j, "in", "linear map").get<int>(), out);
    case LinearMap::Kind::quadratic: return LinearMap::quadratic(need(j, "in", "linear map").get<int>(), out);
  }
  throw ConfigError("linear map: unknown kind");
}

json map_to_json(const LinearMap& m) {
  json j{{"kind", to_string(m.kind())}, {"out", m.out_dim()}};
  if (m.kind() == LinearMap::Kind::tabular) j["n_states"] = m.in_dim();
  if (m.kind() == LinearMap::Kind::affine || m.kind() == LinearMap::Kind::quadratic) j["in"] = m.in_dim();
  return j;
}

Vector params_or_zero(const json& j, int n, const char* what) {
  if (!j.contains("params")) return Vector::Zero(n);
  Vector v = to_vector(j.at("params"), what);
  if (v.size() != n) {
    throw ConfigError(std::string(what) + ": expected " + std::to_string(n) + " params, got " +
                      std::to_string(v.size()));
  }
  return v;
}

// ---------------------------------------------------------------- policies

GaussianPolicy gaussian_from_json(const json& j) {
  check_keys(j, {"class", "mean_map", "cov_map", "params", "mean", "cov_factor", "covariance_mode"}, "gaussian");
  GaussianPolicy g = [&] {
    if (j.contains("mean")) {
      const Vector mu = to_vector(j.at("mean"), "gaussian.mean");
      const Matrix l = to_matrix(need(j, "cov_factor", "gaussian"), "gaussian.cov_factor");
      return GaussianPolicy::constant(mu, l);
    }
    LinearMap mean_map = map_from_json(need(j, "mean_map", "gaussian"));
    LinearMap cov_map = map_from_json(need(j, "cov_map", "gaussian"));
    const int n = mean_map.n_params() + cov_map.n_params();
    return GaussianPolicy(mean_map, cov_map, params_or_zero(j, n, "gaussian"));
  }();
  if (j.contains("covariance_mode")) {
    g.set_covariance_mode(covariance_mode_from_string(j.at("covariance_mode").get<std::string>()));
  }
  return g;
}

json gaussian_to_json(const GaussianPolicy& g) {
  return json{{"class", "gaussian"},
              {"mean_map", map_to_json(g.mean_map())},
              {"cov_map", map_to_json(g.cov_map())},
              {"covariance_mode", to_string(g.covariance_mode())},
              {"params", from_vector(g.params())}};
}

PolicySpec policy_from_json(const json& j) {
  const std::string cls = need(j, "class", "policy").get<std::string>();
  if (cls == "gaussian") return gaussian_from_json(j);
  if (cls == "squashed") {
    check_keys(j, {"class", "squash", "base"}, "squashed");
    return SquashedPolicy(gaussian_from_json(need(j, "base", "squashed")),
                          squash_from_string(need(j, "squash", "squashed").get<std::string>()));
  }
  if (cls == "clipped") {
    check_keys(j, {"class", "base"}, "clipped");
    return ClippedPolicy(gaussian_from_json(need(j, "base", "clipped")));
  }
  if (cls == "dirac") {
    check_keys(j, {"class", "action_map", "params"}, "dirac");
    LinearMap m = map_from_json(need(j, "action_map", "dirac"));
    const int n = m.n_params();
    return DiracPolicy(m, params_or_zero(j, n, "dirac"));
  }
  if (cls == "softmax") {
    check_keys(j, {"class", "logits_map", "params", "tied"}, "softmax");
    LinearMap m = map_from_json(need(j, "logits_map", "softmax"));
    const int n = m.n_params();
    return SoftmaxPolicy(m, params_or_zero(j, n, "softmax"), j.value("tied", false));
  }
  if (cls == "gamma") {
    check_keys(j, {"class", "shape", "log_rate_map", "params"}, "gamma");
    LinearMap m = map_from_json(need(j, "log_rate_map", "gamma"));
    const int n = m.n_params();
    return GammaPolicy(need(j, "shape", "gamma").get<double>(), m, params_or_zero(j, n, "gamma"));
  }
  if (cls == "polyexp") {
    check_keys(j, {"class", "degree", "eta_map", "params"}, "polyexp");
    LinearMap m = map_from_json(need(j, "eta_map", "polyexp"));
    const int n = m.n_params();
    return PolyExpPolicy(need(j, "degree", "polyexp").get<int>(), m, params_or_zero(j, n, "polyexp"));
  }
  throw ConfigError("unknown policy class '" + cls + "'");
}

json policy_to_json(const PolicySpec& spec) {
  struct Visitor {
    json operator()(const std::monostate&) const { return nullptr; }
    json operator()(const GaussianPolicy& g) const { return gaussian_to_json(g); }
    json operator()(const SquashedPolicy& p) const {
      return json{{"class", "squashed"}, {"squash", to_string(p.squash_map())}, {"base", gaussian_to_json(p.base())}};
    }
    json operator()(const ClippedPolicy& p) const {
      return json{{"class", "clipped"}, {"base", gaussian_to_json(p.base())}};
    }
    json operator()(const DiracPolicy& p) const {
      return json{{"class", "dirac"}, {"action_map", map_to_json(p.action_map())}, {"params", from_vector(p.params())}};
    }
    json operator()(const SoftmaxPolicy& p) const {
      return json{{"class", "softmax"},
                  {"logits_map", map_to_json(p.logits_map())},
                  {"tied", p.tied_critic()},
                  {"params", from_vector(p.params())}};
    }
    json operator()(const GammaPolicy& p) const {
      return json{{"class", "gamma"},
                  {"shape", p.shape()},
                  {"log_rate_map", map_to_json(p.log_rate_map())},
                  {"params", from_vector(p.params())}};
    }
    json operator()(const PolyExpPolicy& p) const {
      return json{{"class", "polyexp"},
                  {"degree", p.degree()},
                  {"eta_map", map_to_json(p.eta_map())},
                  {"params", from_vector(p.params())}};
    }
  };
  return std::visit(Visitor{}, spec);
}

// ----------------------------------------------------------------- critics

CriticSpec critic_from_json(const json& j) {
  const std::string cls = need(j, "class", "critic").get<std::string>();
  if (cls == "tabular_q") {
    check_keys(j, {"class", "table", "n_states", "n_actions"}, "tabular_q");
    if (j.contains("table")) return TabularQCritic(to_matrix(j.at("table"), "tabular_q.table"));
    return TabularQCritic(need(j, "n_states", "tabular_q").get<int>(), need(j, "n_actions", "tabular_q").get<int>());
  }
  if (cls == "quadric") {
    check_keys(j, {"class", "A", "B", "c", "a_map", "b_map", "c_map", "params"}, "quadric");
    if (j.contains("A")) {
      const Matrix a = to_matrix(j.at("A"), "quadric.A");
      const Vector b = j.contains("B") ? to_vector(j.at("B"), "quadric.B") : Vector::Zero(a.rows());
      return QuadricCritic::constant(a, b, j.value("c", 0.0));
    }
    LinearMap am = map_from_json(need(j, "a_map", "quadric"));
    LinearMap bm = map_from_json(need(j, "b_map", "quadric"));
    LinearMap cm = map_from_json(need(j, "c_map", "quadric"));
    const int n = am.n_params() + bm.n_params() + cm.n_params();
    return QuadricCritic(am, bm, cm, params_or_zero(j, n, "quadric"));
  }
  if (cls == "polynomial") {
    check_keys(j, {"class", "dim", "degree", "coeff_map", "params"}, "polynomial");
    LinearMap m = map_from_json(need(j, "coeff_map", "polynomial"));
    const int n = m.n_params();
    return PolynomialCritic(need(j, "dim", "polynomial").get<int>(), need(j, "degree", "polynomial").get<int>(), m,
                            params_or_zero(j, n, "polynomial"));
  }
  if (cls == "linear") {
    check_keys(j, {"class", "coeff_map", "params"}, "linear");
    LinearMap m = map_from_json(need(j, "coeff_map", "linear"));
    const int n = m.n_params();
    return LinearCritic(m, params_or_zero(j, n, "linear"));
  }
  throw ConfigError("unknown critic class '" + cls + "'");
}

json critic_to_json(const CriticSpec& spec) {
  struct Visitor {
    json operator()(const std::monostate&) const { return nullptr; }
    json operator()(const TabularQCritic& c) const { return json{{"class", "tabular_q"}, {"table", from_matrix(c.table())}}; }
    json operator()(const QuadricCritic& c) const {
      return json{{"class", "quadric"},
                  {"a_map", map_to_json(c.a_map())},
                  {"b_map", map_to_json(c.b_map())},
                  {"c_map", map_to_json(c.c_map())},
                  {"params", from_vector(c.params())}};
    }
    json operator()(const PolynomialCritic& c) const {
      return json{{"class", "polynomial"},
                  {"dim", c.action_dim()},
                  {"degree", c.degree_bound()},
                  {"coeff_map", map_to_json(c.coeff_map())},
                  {"params", from_vector(c.params())}};
    }
    json operator()(const LinearCritic& c) const {
      return json{{"class", "linear"}, {"coeff_map", map_to_json(c.coeff_map())}, {"params", from_vector(c.params())}};
    }
  };
  return std::visit(Visitor{}, spec);
}

// -------------------------------------------------------------------- envs

EnvSpec env_from_json(const json& j) {
  const std::string type = need(j, "type", "env").get<std::string>();
  if (type == "lqr") {
    check_keys(j, {"type", "F", "G", "Qc", "Rc", "noise_cov", "gamma", "horizon", "initial_mean", "initial_cov"},
               "lqr");
    LQREnv e;
    e.F = to_matrix(need(j, "F", "lqr"), "lqr.F");
    e.G = to_matrix(need(j, "G", "lqr"), "lqr.G");
    e.Qc = to_matrix(need(j, "Qc", "lqr"), "lqr.Qc");
    e.Rc = to_matrix(need(j, "Rc", "lqr"), "lqr.Rc");
    e.noise_cov = j.contains("noise_cov") ? to_matrix(j.at("noise_cov"), "lqr.noise_cov")
                                          : Matrix::Zero(e.F.rows(), e.F.rows());
    e.gamma = j.value("gamma", e.gamma);
    e.horizon = j.value("horizon", e.horizon);
    e.initial_mean = j.contains("initial_mean") ? to_vector(j.at("initial_mean"), "lqr.initial_mean")
                                                : Vector::Zero(e.F.rows());
    e.initial_cov = j.contains("initial_cov") ? to_matrix(j.at("initial_cov"), "lqr.initial_cov")
                                              : Matrix::Zero(e.F.rows(), e.F.rows());
    e.validate();
    return e;
  }
  if (type == "bandit") {
    check_keys(j, {"type", "peak"}, "bandit");
    return BoundedBandit::quadratic(to_vector(need(j, "peak", "bandit"), "bandit.peak"));
  }
  if (type == "tabular") {
    check_keys(j, {"type", "transition", "reward", "initial", "gamma"}, "tabular");
    TabularMDP m;
    const json& tr = need(j, "transition", "tabular");
    if (!tr.is_array() || tr.empty()) throw ConfigError("tabular.transition: expected one matrix per state");
    for (const auto& ps : tr) m.transition.push_back(to_matrix(ps, "tabular.transition"));
    m.reward = to_matrix(need(j, "reward", "tabular"), "tabular.reward");
    m.n_states = static_cast<int>(m.transition.size());
    m.n_actions = static_cast<int>(m.reward.cols());
    m.initial = to_vector(need(j, "initial", "tabular"), "tabular.initial");
    m.gamma = j.value("gamma", m.gamma);
    m.validate();
    return m;
  }
  if (type == "random_tabular") {
    check_keys(j, {"type", "n_states", "n_actions", "gamma", "seed"}, "random_tabular");
    return random_tabular_mdp(need(j, "n_states", "random_tabular").get<int>(),
                              need(j, "n_actions", "random_tabular").get<int>(), j.value("gamma", 0.9),
                              j.value("seed", std::uint64_t{0}));
  }
  throw ConfigError("unknown env type '" + type + "'");
}

json env_to_json(const EnvSpec& spec) {
  if (const auto* e = std::get_if<LQREnv>(&spec)) {
    return json{{"type", "lqr"},
                {"F", from_matrix(e->F)},
                {"G", from_matrix(e->G)},
                {"Qc", from_matrix(e->Qc)},
                {"Rc", from_matrix(e->Rc)},
                {"noise_cov", from_matrix(e->noise_cov)},
                {"gamma", e->gamma},
                {"horizon", e->horizon},
                {"initial_mean", from_vector(e->initial_mean)},
                {"initial_cov", from_matrix(e->initial_cov)}};
  }
  if (const auto* b = std::get_if<BoundedBandit>(&spec)) {
    if (!b->peak) throw ConfigError("bandit with a custom reward cannot be serialised");
    return json{{"type", "bandit"}, {"peak", from_vector(*b->peak)}};
  }
  if (const auto* m = std::get_if<TabularMDP>(&spec)) {
    json tr = json::array();
    for (const auto& p : m->transition) tr.push_back(from_matrix(p));
    return json{{"type", "tabular"},
                {"transition", tr},
                {"reward", from_matrix(m->reward)},
                {"initial", from_vector(m->initial)},
                {"gamma", m->gamma}};
  }
  return nullptr;
}

double env_gamma(const EnvSpec& env) {
  if (const auto* e = std::get_if<LQREnv>(&env)) return e->gamma;
  if (const auto* m = std::get_if<TabularMDP>(&env)) return m->gamma;
  return 0.0;
}

// ------------------------------------------------------------- validation

bool is_continuous_policy(const PolicySpec& p) {
  return !std::holds_alternative<std::monostate>(p) && !std::holds_alternative<SoftmaxPolicy>(p);
}

int policy_action_dim(const PolicySpec& p) {
  if (const auto* s = std::get_if<SoftmaxPolicy>(&p)) return s->n_actions();
  if (!is_continuous_policy(p)) return 0;
  return detail::make_policy(p)->action_dim();
}

bool quadric_capable(const CriticSpec& c) {
  if (std::holds_alternative<QuadricCritic>(c) || std::holds_alternative<LinearCritic>(c)) return true;
  if (const auto* p = std::get_if<PolynomialCritic>(&c)) return p->degree_bound() <= 2;
  return false;
}

bool polynomial_capable(const CriticSpec& c) {
  return std::holds_alternative<QuadricCritic>(c) || std::holds_alternative<LinearCritic>(c) ||
         std::holds_alternative<PolynomialCritic>(c);
}

bool gaussian_based(const PolicySpec& p) {
  return std::holds_alternative<GaussianPolicy>(p) || std::holds_alternative<ClippedPolicy>(p);
}

void validate_estimator(const RunConfig& c) {
  const auto& p = c.policy;
  const char* est = to_string(c.estimator);
  auto fail = [&](const std::string& why) {
    throw ConfigError(std::string("estimator ") + est + " " + why);
  };
  switch (c.estimator) {
    case Estimator::exact_sum:
      fail("needs a discrete action space");
      return;
    case Estimator::gaussian_quadric:
      if (!gaussian_based(p)) fail("needs a Gaussian or clipped-Gaussian policy");
      if (!quadric_capable(c.critic)) fail("needs a critic of degree <= 2 in the action");
      return;
    case Estimator::gaussian_general:
      if (!gaussian_based(p)) fail("needs a Gaussian or clipped-Gaussian policy");
      return;
    case Estimator::expfam_polynomial:
      if (!gaussian_based(p) && !std::holds_alternative<GammaPolicy>(p) && !std::holds_alternative<PolyExpPolicy>(p)) {
        fail("needs an exponential-family policy");
      }
      if (!polynomial_capable(c.critic)) fail("needs a polynomial critic");
      return;
    case Estimator::reparameterised:
      if (!std::holds_alternative<SquashedPolicy>(p)) fail("needs a squashed policy");
      if (!quadric_capable(c.critic) && !polynomial_capable(c.critic)) fail("needs a polynomial critic in b");
      return;
    case Estimator::linear:
      if (!std::holds_alternative<LinearCritic>(c.critic)) fail("needs a linear critic");
      return;
    case Estimator::gauss_legendre:
      if (!gaussian_based(p)) fail("needs a Gaussian or clipped-Gaussian policy");
      if (policy_action_dim(p) > 3) fail("supports action dimension <= 3");
      if (c.gl_order < 1) fail("needs gl_order >= 1");
      return;
    case Estimator::monte_carlo:
      if (std::holds_alternative<DiracPolicy>(p)) fail("needs a stochastic policy");
      if (c.mc_samples < 1) fail("needs mc_samples >= 1");
      return;
    case Estimator::dirac:
      if (!std::holds_alternative<DiracPolicy>(p)) fail("needs a Dirac policy");
      return;
  }
}

}  // namespace

const char* to_string(Algorithm a) { return enum_to(a, kAlgorithms); }
const char* to_string(Estimator e) { return enum_to(e, kEstimators); }
const char* to_string(CriticLearner l) { return enum_to(l, kLearners); }
const char* to_string(BaselineKind b) { return enum_to(b, kBaselines); }
Algorithm algorithm_from_string(const std::string& s) { return enum_from(s, kAlgorithms, "algorithm"); }
Estimator estimator_from_string(const std::string& s) { return enum_from(s, kEstimators, "estimator"); }
CriticLearner critic_learner_from_string(const std::string& s) { return enum_from(s, kLearners, "critic learner"); }
BaselineKind baseline_from_string(const std::string& s) { return enum_from(s, kBaselines, "baseline"); }

void RunConfig::validate() const {
  if (std::holds_alternative<std::monostate>(env)) throw ConfigError("config: no environment");
  if (std::holds_alternative<std::monostate>(policy)) throw ConfigError("config: no policy");
  if (std::holds_alternative<std::monostate>(critic)) throw ConfigError("config: no critic");
  if (!(actor_lr >= 0.0) || !(critic_lr >= 0.0)) throw ConfigError("config: learning rates must be >= 0");
  if (horizon < 1) throw ConfigError("config: horizon must be >= 1");
  if (total_steps < 0) throw ConfigError("config: total_steps must be >= 0");
  if (eval_every < 1 || eval_episodes < 1) throw ConfigError("config: eval_every and eval_episodes must be >= 1");
  if (critic_learner == CriticLearner::rls && (!(rls_forgetting > 0.0 && rls_forgetting <= 1.0) ||
                                               !(rls_initial_scale > 0.0))) {
    throw ConfigError("config: rls needs forgetting in (0, 1] and a positive initial scale");
  }
  const bool offpolicy = algorithm == Algorithm::offpolicy_epg;
  if (offpolicy && !behaviour_is_target && std::holds_alternative<std::monostate>(behaviour)) {
    throw ConfigError("config: off-policy runs need a behaviour policy");
  }

  if (const auto* mdp = std::get_if<TabularMDP>(&env)) {
    mdp->validate();
    const auto* pi = std::get_if<SoftmaxPolicy>(&policy);
    const auto* q = std::get_if<TabularQCritic>(&critic);
    if (!pi || !q) throw ConfigError("config: tabular environments need a softmax policy and a tabular_q critic");
    if (pi->n_actions() != mdp->n_actions || q->n_actions() != mdp->n_actions || q->n_states() != mdp->n_states) {
      throw ConfigError("config: policy/critic shapes do not match the MDP");
    }
    if (pi->logits_map().kind() == LinearMap::Kind::tabular && pi->logits_map().in_dim() != mdp->n_states) {
      throw ConfigError("config: tabular logits map has the wrong number of states");
    }
    if (offpolicy && !behaviour_is_target) {
      const auto* b = std::get_if<SoftmaxPolicy>(&behaviour);
      if (!b || b->n_actions() != mdp->n_actions) throw ConfigError("config: behaviour must be a matching softmax");
    }
    if (algorithm == Algorithm::gpg || algorithm == Algorithm::dpg || algorithm == Algorithm::clipped) {
      throw ConfigError(std::string("config: algorithm ") + to_string(algorithm) + " needs continuous actions");
    }
    if (algorithm != Algorithm::spg && estimator != Estimator::exact_sum && estimator != Estimator::monte_carlo) {
      throw ConfigError(std::string("estimator ") + to_string(estimator) + " needs continuous actions");
    }
    if (estimator == Estimator::monte_carlo && mc_samples < 1) throw ConfigError("config: mc_samples must be >= 1");
    return;
  }

  if (!is_continuous_policy(policy)) throw ConfigError("config: continuous environments need a continuous policy");
  if (std::holds_alternative<TabularQCritic>(critic)) {
    throw ConfigError("config: continuous environments need a parametric critic");
  }
  const int dim_a = std::holds_alternative<LQREnv>(env) ? std::get<LQREnv>(env).dim_a()
                                                        : std::get<BoundedBandit>(env).dim_a;
  if (policy_action_dim(policy) != dim_a) throw ConfigError("config: policy action dimension does not match env");
  if (detail::make_critic(critic)->action_dim() != dim_a) {
    throw ConfigError("config: critic action dimension does not match env");
  }
  if (const auto* e = std::get_if<LQREnv>(&env)) e->validate();
  if (offpolicy && !behaviour_is_target) {
    if (!is_continuous_policy(behaviour) || policy_action_dim(behaviour) != dim_a) {
      throw ConfigError("config: behaviour must be a continuous policy of matching dimension");
    }
  }

  switch (algorithm) {
    case Algorithm::gpg:
      if (!gaussian_based(policy)) throw ConfigError("config: gpg needs a Gaussian or clipped-Gaussian policy");
      exploration.validate();
      break;
    case Algorithm::dpg:
      if (!std::holds_alternative<DiracPolicy>(policy)) throw ConfigError("config: dpg needs a dirac policy");
      if (!(ou_sigma >= 0.0)) throw ConfigError("config: ou_sigma must be >= 0");
      break;
    case Algorithm::clipped:
      if (!std::holds_alternative<BoundedBandit>(env)) throw ConfigError("config: clipped runs need a bandit env");
      if (!std::holds_alternative<ClippedPolicy>(policy)) throw ConfigError("config: clipped runs need a clipped policy");
      break;
    case Algorithm::spg:
      if (std::holds_alternative<DiracPolicy>(policy)) throw ConfigError("config: spg needs a stochastic policy");
      break;
    case Algorithm::epg:
    case Algorithm::offpolicy_epg:
      break;
  }
  if (const auto* core = std::get_if<GaussianPolicy>(&policy);
      core && core->covariance_mode() == CovarianceMode::hessian_derived) {
    exploration.validate();
  }
  if (const auto* clip = std::get_if<ClippedPolicy>(&policy);
      clip && clip->base().covariance_mode() == CovarianceMode::hessian_derived) {
    exploration.validate();
  }
  if (algorithm != Algorithm::spg) validate_estimator(*this);
}

// ------------------------------------------------------------ json config

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j,
             {"algorithm", "env", "policy", "critic", "behaviour", "estimator", "sigma0", "c", "hessian_source",
              "fit", "ou_psi", "ou_sigma", "freeze_covariance", "actor_lr", "critic_lr", "critic_schedule",
              "critic_learner", "rls_forgetting", "rls_initial_scale", "optimiser", "hermite_order", "horizon",
              "total_steps", "seed", "gamma", "discount-gradient", "baseline", "baseline_constant", "gl_order",
              "mc_samples", "eval_every", "eval_episodes", "eval_horizon", "trace_limit", "covariance_mode"},
             "config");
  RunConfig c;
  try {
    if (j.contains("algorithm")) c.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    c.env = env_from_json(need(j, "env", "config"));
    c.policy = policy_from_json(need(j, "policy", "config"));
    c.critic = critic_from_json(need(j, "critic", "config"));
    if (j.contains("behaviour")) {
      const json& b = j.at("behaviour");
      if (b.is_string() && b.get<std::string>() == "target") {
        c.behaviour_is_target = true;
      } else {
        c.behaviour = policy_from_json(b);
      }
    }
    if (j.contains("estimator")) c.estimator = estimator_from_string(j.at("estimator").get<std::string>());
    c.exploration.sigma0 = j.value("sigma0", c.exploration.sigma0);
    c.exploration.c = j.value("c", c.exploration.c);
    if (j.contains("hessian_source")) {
      c.hessian_source = enum_from(j.at("hessian_source").get<std::string>(), kHessianSources, "hessian source");
    }
    if (j.contains("fit")) {
      const json& f = j.at("fit");
      check_keys(f, {"n_samples", "radius", "seed"}, "fit");
      c.fit.n_samples = f.value("n_samples", c.fit.n_samples);
      c.fit.radius = f.value("radius", c.fit.radius);
      c.fit.seed = f.value("seed", c.fit.seed);
    }
    c.ou_psi = j.value("ou_psi", c.ou_psi);
    c.ou_sigma = j.value("ou_sigma", c.ou_sigma);
    c.freeze_covariance = j.value("freeze_covariance", c.freeze_covariance);
    c.actor_lr = j.value("actor_lr", c.actor_lr);
    c.critic_lr = j.value("critic_lr", c.critic_lr);
    if (j.contains("critic_schedule")) {
      c.critic_schedule = enum_from(j.at("critic_schedule").get<std::string>(), kSchedules, "critic schedule");
    }
    if (j.contains("critic_learner")) {
      c.critic_learner = critic_learner_from_string(j.at("critic_learner").get<std::string>());
    }
    c.rls_forgetting = j.value("rls_forgetting", c.rls_forgetting);
    c.rls_initial_scale = j.value("rls_initial_scale", c.rls_initial_scale);
    if (j.contains("optimiser")) {
      c.optimiser = enum_from(j.at("optimiser").get<std::string>(), kOptimisers, "optimiser");
    }
    c.expectation.hermite_order = j.value("hermite_order", c.expectation.hermite_order);
    c.horizon = j.value("horizon", c.horizon);
    if (auto* e = std::get_if<LQREnv>(&c.env)) {
      if (j.contains("horizon")) e->horizon = c.horizon;
      c.horizon = e->horizon;
    }
    c.total_steps = j.value("total_steps", c.total_steps);
    c.seed = j.value("seed", c.seed);
    if (j.contains("gamma")) {
      const double g = j.at("gamma").get<double>();
      if (auto* e = std::get_if<LQREnv>(&c.env)) e->gamma = g;
      if (auto* m = std::get_if<TabularMDP>(&c.env)) m->gamma = g;
    }
    c.discount_gradient = j.value("discount-gradient", c.discount_gradient);
    if (j.contains("baseline")) c.baseline = baseline_from_string(j.at("baseline").get<std::string>());
    c.baseline_constant = j.value("baseline_constant", c.baseline_constant);
    c.gl_order = j.value("gl_order", c.gl_order);
    c.mc_samples = j.value("mc_samples", c.mc_samples);
    c.eval_every = j.value("eval_every", c.eval_every);
    c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
    c.eval_horizon = j.value("eval_horizon", c.eval_horizon);
    c.trace_limit = j.value("trace_limit", c.trace_limit);
    if (j.contains("covariance_mode")) {
      const CovarianceMode mode = covariance_mode_from_string(j.at("covariance_mode").get<std::string>());
      if (auto* g = std::get_if<GaussianPolicy>(&c.policy)) g->set_covariance_mode(mode);
      if (auto* g = std::get_if<ClippedPolicy>(&c.policy)) g->base().set_covariance_mode(mode);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string dump_run_config(const RunConfig& c) {
  json j;
  j["algorithm"] = to_string(c.algorithm);
  j["env"] = env_to_json(c.env);
  j["policy"] = policy_to_json(c.policy);
  j["critic"] = critic_to_json(c.critic);
  if (c.behaviour_is_target) {
    j["behaviour"] = "target";
  } else if (!std::holds_alternative<std::monostate>(c.behaviour)) {
    j["behaviour"] = policy_to_json(c.behaviour);
  }
  j["estimator"] = to_string(c.estimator);
  j["sigma0"] = c.exploration.sigma0;
  j["c"] = c.exploration.c;
  j["hessian_source"] = enum_to(c.hessian_source, kHessianSources);
  j["fit"] = json{{"n_samples", c.fit.n_samples}, {"radius", c.fit.radius}, {"seed", c.fit.seed}};
  j["ou_psi"] = c.ou_psi;
  j["ou_sigma"] = c.ou_sigma;
  j["freeze_covariance"] = c.freeze_covariance;
  j["actor_lr"] = c.actor_lr;
  j["critic_lr"] = c.critic_lr;
  j["critic_schedule"] = enum_to(c.critic_schedule, kSchedules);
  j["critic_learner"] = to_string(c.critic_learner);
  j["rls_forgetting"] = c.rls_forgetting;
  j["rls_initial_scale"] = c.rls_initial_scale;
  j["optimiser"] = enum_to(c.optimiser, kOptimisers);
  j["hermite_order"] = c.expectation.hermite_order;
  j["horizon"] = c.horizon;
  j["total_steps"] = c.total_steps;
  j["seed"] = c.seed;
  j["discount-gradient"] = c.discount_gradient;
  j["baseline"] = to_string(c.baseline);
  j["baseline_constant"] = c.baseline_constant;
  j["gl_order"] = c.gl_order;
  j["mc_samples"] = c.mc_samples;
  j["eval_every"] = c.eval_every;
  j["eval_episodes"] = c.eval_episodes;
  j["eval_horizon"] = c.eval_horizon;
  j["trace_limit"] = c.trace_limit;
  if (!std::holds_alternative<BoundedBandit>(c.env)) j["gamma"] = env_gamma(c.env);
  return j.dump(2);
}

std::string serialize_policy(const PolicySpec& policy) { return policy_to_json(policy).dump(); }

PolicySpec deserialize_policy(const std::string& json_text) {
  try {
    return policy_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("policy: ") + e.what());
  }
}

std::string serialize_critic(const CriticSpec& critic) { return critic_to_json(critic).dump(); }

CriticSpec deserialize_critic(const std::string& json_text) {
  try {
    return critic_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("critic: ") + e.what());
  }
}

// ---------------------------------------------------------------- detail

namespace detail {

std::unique_ptr<Policy> make_policy(const PolicySpec& spec) {
  struct Visitor {
    std::unique_ptr<Policy> operator()(const std::monostate&) const { throw ConfigError("no policy configured"); }
    std::unique_ptr<Policy> operator()(const SoftmaxPolicy&) const {
      throw ConfigError("softmax policies act on discrete action spaces");
    }
    std::unique_ptr<Policy> operator()(const Policy& p) const { return p.clone(); }
  };
  return std::visit(Visitor{}, spec);
}

std::unique_ptr<ParametricCritic> make_critic(const CriticSpec& spec) {
  struct Visitor {
    std::unique_ptr<ParametricCritic> operator()(const std::monostate&) const {
      throw ConfigError("no critic configured");
    }
    std::unique_ptr<ParametricCritic> operator()(const TabularQCritic&) const {
      throw ConfigError("tabular critics act on discrete action spaces");
    }
    std::unique_ptr<ParametricCritic> operator()(const QuadricCritic& c) const {
      return std::make_unique<QuadricCritic>(c);
    }
    std::unique_ptr<ParametricCritic> operator()(const PolynomialCritic& c) const {
      return std::make_unique<PolynomialCritic>(c);
    }
    std::unique_ptr<ParametricCritic> operator()(const LinearCritic& c) const {
      return std::make_unique<LinearCritic>(c);
    }
  };
  return std::visit(Visitor{}, spec);
}

const GaussianPolicy* gaussian_core(const Policy& p) {
  if (const auto* g = dynamic_cast<const GaussianPolicy*>(&p)) return g;
  if (const auto* c = dynamic_cast<const ClippedPolicy*>(&p)) return &c->base();
  return nullptr;
}

GaussianPolicy* gaussian_core(Policy& p) {
  if (auto* g = dynamic_cast<GaussianPolicy*>(&p)) return g;
  if (auto* c = dynamic_cast<ClippedPolicy*>(&p)) return &c->base();
  return nullptr;
}

const Policy& critic_policy(const Policy& p) {
  if (const auto* c = dynamic_cast<const ClippedPolicy*>(&p)) return c->base();
  if (const auto* s = dynamic_cast<const SquashedPolicy*>(&p)) return s->base();
  return p;
}

bool is_tabular(const RunConfig& c) { return std::holds_alternative<TabularMDP>(c.env); }

}  // namespace detail

}  // namespace epg
