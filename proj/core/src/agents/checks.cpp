#include "epg/agents/checks.hpp"

#include <cmath>

#include "epg/critics/tabular.hpp"
#include "epg/quadrature/evaluators.hpp"
#include "epg/quadrature/theorem.hpp"

namespace epg {

namespace {

void check_shared_mean(const GaussianPolicy& policy, const DiracPolicy& dirac) {
  if (!(policy.mean_map() == dirac.action_map())) {
    throw ConfigError("equivalence check: Dirac action map differs from the Gaussian mean map");
  }
  if (policy.params().head(policy.n_mean_params()) != dirac.params()) {
    throw ConfigError("equivalence check: mean parameters are not shared");
  }
}

double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng);
}

Vector uniform_vector(Rng& rng, int n, double lo, double hi) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

// Full (non-triangular) factor with a dominant diagonal.
Matrix random_factor(Rng& rng, int d) {
  Matrix l(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) l(i, j) = i == j ? uniform(rng, 0.4, 1.0) : uniform(rng, -0.2, 0.2);
  }
  return l;
}

struct Instance {
  GaussianPolicy policy;
  QuadricCritic critic;
  State state;
};

Instance random_instance(int d, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  constexpr int kStateDim = 2;
  const LinearMap mean_map = LinearMap::affine(kStateDim, d);
  const LinearMap cov_map = LinearMap::affine(kStateDim, d * d);
  const State s = State::continuous(uniform_vector(rng, kStateDim, -1.0, 1.0));

  Vector theta(mean_map.n_params() + cov_map.n_params());
  theta.head(mean_map.n_params()) = uniform_vector(rng, mean_map.n_params(), -1.0, 1.0);
  // cov weights: small state slopes, bias column holds the factor
  Matrix w_cov(d * d, kStateDim + 1);
  for (int j = 0; j < kStateDim; ++j) w_cov.col(j) = uniform_vector(rng, d * d, -0.05, 0.05);
  const Matrix l0 = random_factor(rng, d);
  w_cov.col(kStateDim) = Eigen::Map<const Vector>(l0.data(), d * d);
  theta.tail(cov_map.n_params()) = Eigen::Map<const Vector>(w_cov.data(), w_cov.size());
  GaussianPolicy policy(mean_map, cov_map, theta);

  const LinearMap a_map = LinearMap::affine(kStateDim, d * d);
  const LinearMap b_map = LinearMap::affine(kStateDim, d);
  const LinearMap c_map = LinearMap::affine(kStateDim, 1);
  const int nq = a_map.n_params() + b_map.n_params() + c_map.n_params();
  QuadricCritic critic(a_map, b_map, c_map, uniform_vector(rng, nq, -1.0, 1.0));
  return {std::move(policy), std::move(critic), s};
}

AgreementRow exact_row(int i, int d, const char* pair, const GradientEstimate& a, const GradientEstimate& b,
                       double tol) {
  const double diff = a.max_abs_diff(b);
  return {i, d, pair, diff, tol, diff <= tol};
}

}  // namespace

double equivalence_check_gpg_dpg(const GaussianPolicy& policy, const DiracPolicy& dirac, const Critic& critic,
                                 const std::vector<State>& states) {
  check_shared_mean(policy, dirac);
  double worst = 0.0;
  for (const auto& s : states) {
    const Vector g_mean = integrate_gaussian_quadric(policy, critic, s).block("mean");
    const Vector g_dirac = integrate_dirac(dirac, critic, s).flat();
    worst = std::max(worst, (g_mean - g_dirac).cwiseAbs().maxCoeff());
  }
  return worst;
}

LockstepResult lockstep_gpg_dpg(GaussianPolicy policy, DiracPolicy dirac, const std::vector<QuadricCritic>& critics,
                                const std::vector<State>& states, double step_size) {
  check_shared_mean(policy, dirac);
  if (critics.size() != states.size()) throw ConfigError("lockstep_gpg_dpg: one critic per state");
  const int nm = policy.n_mean_params();
  LockstepResult out;
  for (std::size_t k = 0; k < states.size(); ++k) {
    Vector theta = policy.params();
    theta.head(nm) += step_size * integrate_gaussian_quadric(policy, critics[k], states[k]).block("mean");
    policy.set_params(theta);
    dirac.set_params(dirac.params() + step_size * integrate_dirac(dirac, critics[k], states[k]).flat());
    out.max_param_deviation =
        std::max(out.max_param_deviation, (policy.params().head(nm) - dirac.params()).cwiseAbs().maxCoeff());
  }
  out.gaussian_mean_params = policy.params().head(nm);
  out.dirac_params = dirac.params();
  return out;
}

double entropy_identity_check(const SoftmaxPolicy& policy, double alpha, const std::vector<State>& states) {
  if (!policy.tied_critic()) throw ConfigError("entropy_identity_check: policy is not in tied-critic mode");
  const TiedSoftmaxCritic critic(policy);
  const ShiftedDiscreteCritic shifted = entropy_shift(critic, policy, alpha);
  double worst = 0.0;
  for (const auto& s : states) {
    const Vector lhs = integrate_discrete(policy, shifted, s).flat();
    const Vector rhs = -(1.0 - alpha) * policy_entropy_grad(policy, s).flat();
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<AgreementRow> estimator_agreement(const AgreementConfig& config) {
  std::vector<AgreementRow> rows;
  for (int i = 0; i < config.n_instances; ++i) {
    const int d = 1 + i % 3;
    const Instance inst = random_instance(d, derive_seed(config.seed, static_cast<std::uint64_t>(i)));
    const GradientEstimate analytic = integrate_gaussian_quadric(inst.policy, inst.critic, inst.state);
    const GradientEstimate expfam = integrate_expfam_polynomial(inst.policy, inst.critic, inst.state);
    const GradientEstimate gl = integrate_gauss_legendre(inst.policy, inst.critic, inst.state, config.gl_order,
                                                         gaussian_bounds(inst.policy, inst.state));
    rows.push_back(exact_row(i, d, "analytic-vs-expfam", analytic, expfam, config.tolerance));
    rows.push_back(exact_row(i, d, "analytic-vs-gauss_legendre", analytic, gl, config.tolerance));
    rows.push_back(exact_row(i, d, "expfam-vs-gauss_legendre", expfam, gl, config.tolerance));
    if (config.mc_samples > 0) {
      const GradientEstimate mc =
          integrate_monte_carlo(inst.policy, inst.critic, inst.state, config.mc_samples, nullptr,
                                derive_seed(config.seed, 0x3C000000ULL + static_cast<std::uint64_t>(i)));
      double worst = 0.0;
      for (Eigen::Index k = 0; k < mc.flat().size(); ++k) {
        const double diff = std::abs(mc.flat()(k) - analytic.flat()(k));
        const double se = mc.standard_error(k);
        const double ratio = se > 0.0 ? diff / se : (diff > 1e-12 ? INFINITY : 0.0);
        worst = std::max(worst, ratio);
      }
      rows.push_back({i, d, "analytic-vs-monte_carlo[se]", worst, config.mc_se_factor, worst <= config.mc_se_factor});
    }
  }
  return rows;
}

std::vector<ReparamRow> reparameterisation_agreement(int n_instances, std::uint64_t seed, double tolerance) {
  std::vector<ReparamRow> rows;
  for (int i = 0; i < n_instances; ++i) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const Squash g = i % 2 == 0 ? Squash::sigmoid : Squash::exp;
    const Vector mu = uniform_vector(rng, 1, -1.0, 1.0);
    const Matrix l = Matrix::Constant(1, 1, uniform(rng, 0.2, 0.6));
    const SquashedPolicy policy(GaussianPolicy::constant(mu, l), g);
    const QuadricCritic critic_b = QuadricCritic::constant(Matrix::Constant(1, 1, uniform(rng, -1.0, 1.0)),
                                                           uniform_vector(rng, 1, -1.0, 1.0), uniform(rng, -1.0, 1.0));
    const State s = State::continuous(Vector());
    const GradientEstimate closed = integrate_reparameterised(policy, critic_b, s);

    // the same critic expressed over the squashed action a = g(b)
    const FunctionCritic critic_a(1, [critic_b, g](const State& st, const Vector& a) {
      return critic_b.value(st, unsquash(g, a));
    });
    const std::vector<Interval> b_box = gaussian_bounds(policy.base(), s, 8.0);
    const std::vector<Interval> a_box{{squash(g, b_box[0].lo), squash(g, b_box[0].hi)}};
    const GradientEstimate gl = integrate_gauss_legendre(policy, critic_a, s, 32, a_box, 512);
    const double diff = closed.max_abs_diff(gl);
    rows.push_back({i, to_string(g), diff, tolerance, diff <= tolerance});
  }
  return rows;
}

std::vector<TheoremRow> theorem_table(int n_mdps, int n_thetas, std::uint64_t seed, double tolerance) {
  std::vector<TheoremRow> rows;
  for (int m = 0; m < n_mdps; ++m) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(m)));
    std::uniform_int_distribution<int> n_states(1, 4), n_actions(1, 3);
    const int ns = n_states(rng);
    const int na = n_actions(rng);
    const double gamma = uniform(rng, 0.5, 0.95);
    const TabularMDP mdp = random_tabular_mdp(ns, na, gamma, derive_seed(seed, 0x7D000000ULL + m));
    for (int k = 0; k < n_thetas; ++k) {
      const SoftmaxPolicy pi = SoftmaxPolicy::tabular(ns, na, uniform_vector(rng, ns * na, -2.0, 2.0));
      const GeneralPgCheck check = general_pg_check(mdp, pi);
      rows.push_back({m, k, ns, na, check.residual, check.resolvent_gap, tolerance, check.residual <= tolerance});
    }
  }
  return rows;
}

}  // namespace epg
