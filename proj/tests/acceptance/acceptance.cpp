// Acceptance criteria C1-C10. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Pass criterion names (e.g. C3 C8) to run a subset.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "epg/agents/checks.hpp"
#include "epg/agents/runs.hpp"
#include "epg/agents/variance.hpp"
#include "epg/env/trajectory.hpp"

using namespace epg;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(4) << x;
  return os.str();
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vector uniform_vector(Rng& rng, int n, double lo, double hi) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

Matrix random_orthogonal(Rng& rng, int d) {
  std::normal_distribution<double> z;
  Matrix m(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) m(i, j) = z(rng);
  }
  return Eigen::HouseholderQR<Matrix>(m).householderQ();
}

std::string config_path(const char* name) { return std::string(EPG_CONFIG_DIR) + "/" + name; }

// C1
Outcome estimator_agreement_check() {
  const auto t0 = Clock::now();
  AgreementConfig cfg;
  cfg.n_instances = 50;
  cfg.mc_samples = 1000000;
  cfg.gl_order = 32;
  cfg.tolerance = 1e-6;
  cfg.mc_se_factor = 4.0;
  cfg.seed = 2024;
  double worst_exact = 0.0, worst_se = 0.0;
  bool ok = true;
  for (const auto& r : estimator_agreement(cfg)) {
    ok = ok && r.pass;
    if (r.pair.find("monte_carlo") != std::string::npos) {
      worst_se = std::max(worst_se, r.max_abs_diff);
    } else {
      worst_exact = std::max(worst_exact, r.max_abs_diff);
    }
  }
  const double secs = seconds_since(t0);
  ok = ok && secs <= 120.0;
  return {ok, "max exact-pair diff " + fmt(worst_exact) + " (tol 1e-06), max MC gap " + fmt(worst_se) +
                  " SE (tol 4), runtime " + fmt(secs) + " s (limit 120)"};
}

// C2
Outcome general_pg_identity_check() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  bool ok = true;
  const auto rows = theorem_table(10, 10, 11, 1e-4);
  for (const auto& r : rows) {
    ok = ok && r.pass;
    worst = std::max(worst, r.residual);
  }
  const double secs = seconds_since(t0);
  ok = ok && rows.size() == 100 && secs <= 60.0;
  return {ok, std::to_string(rows.size()) + " cases, max residual " + fmt(worst) + " (tol 1e-04), runtime " +
                  fmt(secs) + " s (limit 60)"};
}

// C3
Outcome trajectory_variance_check() {
  const RunConfig cfg = load_run_config(config_path("variance_tabular.json"));
  const std::vector<EstimatorSpec> est = {{TrajectoryEstimator::epg, BaselineKind::none},
                                          {TrajectoryEstimator::spg, BaselineKind::none},
                                          {TrajectoryEstimator::spg, BaselineKind::value},
                                          {TrajectoryEstimator::spg, BaselineKind::constant}};
  const VarianceReport r = variance_harness(cfg, est, 1000);
  bool ok = true;
  std::ostringstream os;
  double min_margin = INFINITY;
  for (const auto& c : r.comparisons) {
    if (c.a != "epg/none") continue;
    const double margin = -c.difference / c.se;
    min_margin = std::min(min_margin, margin);
    ok = ok && margin >= 5.0;
  }
  double worst_moment = 0.0;
  for (const auto& e : r.entries) {
    const double gap = std::abs(e.second_moment - e.predicted_second_moment) / e.second_moment_se;
    worst_moment = std::max(worst_moment, gap);
    ok = ok && gap <= 4.0;
  }
  os << "EPG below every SPG baseline by >= " << fmt(min_margin) << " SE (need 5), second moments within "
     << fmt(worst_moment) << " SE of " << r.prediction_method << " prediction (need 4)";
  return {ok, os.str()};
}

// C4
Outcome exploration_limit_check() {
  Rng rng = make_rng(404);
  const double sigma0 = 0.2;
  double worst = 0.0, slope_lo = INFINITY, slope_hi = -INFINITY;
  bool ok = true;
  for (int k = 0; k < 10; ++k) {
    const Matrix u = random_orthogonal(rng, 3);
    const Matrix h = u * uniform_vector(rng, 3, -2.0, 2.0).asDiagonal() * u.transpose();
    const Matrix target = sigma0 * h.exp();
    std::vector<double> errs;
    for (long n : {1000L, 10000L, 100000L, 1000000L}) {
      errs.push_back((exploration_limit_iterate(h, sigma0, n) - target).norm() / target.norm());
    }
    worst = std::max(worst, errs.back());
    ok = ok && errs.back() <= 1e-3;
    // least-squares slope of log err against log n
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double x = i - 1.5;
      sxy += x * std::log10(errs[static_cast<std::size_t>(i)]);
      sxx += x * x;
    }
    const double slope = sxy / sxx;
    slope_lo = std::min(slope_lo, slope);
    slope_hi = std::max(slope_hi, slope);
    ok = ok && std::abs(slope + 1.0) <= 0.1;
  }
  return {ok, "max relative error at n=1e6 " + fmt(worst) + " (tol 1e-03), log-log slopes in [" + fmt(slope_lo) +
                  ", " + fmt(slope_hi) + "] (need -1 +- 0.1)"};
}

// C5
Outcome gpg_dpg_equivalence_check() {
  Rng rng = make_rng(505);
  double worst_point = 0.0, worst_lock = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    const int d = 1 + inst % 3;
    const LinearMap mm = LinearMap::affine(2, d);
    Vector theta(mm.n_params() + d * d);
    theta.head(mm.n_params()) = uniform_vector(rng, mm.n_params(), -1, 1);
    Matrix l = Matrix::Identity(d, d) * 0.5 + 0.1 * Matrix::NullaryExpr(d, d, [&] { return uniform(rng, -1, 1); });
    theta.tail(d * d) = Eigen::Map<const Vector>(l.data(), d * d);
    const GaussianPolicy g(mm, LinearMap::constant(d * d), theta);
    const DiracPolicy dirac(mm, theta.head(mm.n_params()));
    const auto random_critic = [&] {
      const int n = 3 * (d * d + d + 1);
      return QuadricCritic(LinearMap::affine(2, d * d), LinearMap::affine(2, d), LinearMap::affine(2, 1),
                           uniform_vector(rng, n, -1, 1));
    };
    std::vector<State> states;
    std::vector<QuadricCritic> critics;
    for (int k = 0; k < 100; ++k) {
      states.push_back(State::continuous(uniform_vector(rng, 2, -2, 2)));
      critics.push_back(random_critic());
    }
    worst_point = std::max(worst_point, equivalence_check_gpg_dpg(g, dirac, critics.front(), states));
    worst_lock = std::max(worst_lock, lockstep_gpg_dpg(g, dirac, critics, states, 0.01).max_param_deviation);
  }
  const bool ok = worst_point <= 1e-10 && worst_lock <= 1e-8;
  return {ok, "pointwise mean-update deviation " + fmt(worst_point) + " (tol 1e-10), 100-step lockstep deviation " +
                  fmt(worst_lock) + " (tol 1e-08)"};
}

// C6
Outcome entropy_identity_acceptance() {
  Rng rng = make_rng(606);
  std::vector<State> states;
  for (int s = 0; s < 5; ++s) states.push_back(State::tabular(s));
  double worst = 0.0;
  for (double alpha : {0.0, 0.3, 1.0}) {
    for (int k = 0; k < 10; ++k) {
      const SoftmaxPolicy pi = SoftmaxPolicy::tabular(5, 4, uniform_vector(rng, 20, -3, 3), true);
      worst = std::max(worst, entropy_identity_check(pi, alpha, states));
    }
  }
  return {worst <= 1e-10, "max deviation " + fmt(worst) + " over alpha in {0, 0.3, 1} (tol 1e-10)"};
}

// C7
Outcome reparameterisation_check() {
  double worst = 0.0;
  bool ok = true;
  int logit = 0, lognormal = 0;
  for (const auto& r : reparameterisation_agreement(20, 707, 1e-6)) {
    ok = ok && r.pass;
    worst = std::max(worst, r.max_abs_diff);
    (r.squash == "sigmoid" ? logit : lognormal)++;
  }
  ok = ok && logit + lognormal == 20 && logit > 0 && lognormal > 0;
  return {ok, std::to_string(logit) + " logit-normal + " + std::to_string(lognormal) +
                  " log-normal instances, max diff " + fmt(worst) + " (tol 1e-06)"};
}

// C8
Outcome lqr_end_to_end_check() {
  const RunConfig gpg = load_run_config(config_path("lqr_gpg.json"));
  const RunConfig dpg = load_run_config(config_path("lqr_dpg.json"));
  const double optimum = lqr_riccati(std::get<LQREnv>(gpg.env)).optimal_return;
  int hits = 0;
  double slowest = 0.0;
  std::ostringstream report;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RunConfig c = gpg;
    c.seed = seed;
    auto t0 = Clock::now();
    const LearningCurve curve = run_gpg(c);
    slowest = std::max(slowest, seconds_since(t0));
    const double gap = std::abs(curve.points.back().eval_return - optimum) / std::abs(optimum);
    if (gap <= 0.05) ++hits;

    RunConfig d = dpg;
    d.seed = seed;
    t0 = Clock::now();
    const LearningCurve dcurve = run_dpg(d);
    slowest = std::max(slowest, seconds_since(t0));
    const double dgap = std::abs(dcurve.points.back().eval_return - optimum) / std::abs(optimum);
    report << "    seed " << seed << ": gpg gap " << fmt(100 * gap) << "%, dpg gap " << fmt(100 * dgap) << "%\n";
  }
  std::cout << report.str();
  const bool ok = hits >= 9 && slowest <= 300.0;
  return {ok, std::to_string(hits) + "/10 GPG seeds within 5% of the Riccati optimum " + fmt(optimum) +
                  " (need 9), slowest run " + fmt(slowest) + " s (limit 300)"};
}

// C9
Outcome clipping_check() {
  const RunConfig base = load_run_config(config_path("bandit_clipped.json"));
  const double optimum = std::get<BoundedBandit>(base.env).grid_optimum(10001).first(0);
  int near = 0, boosted = 0;
  std::ostringstream report;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RunConfig c = base;
    c.seed = seed;
    c.trace_limit = c.total_steps;
    const LearningCurve curve = run_clipped(c);
    const ClippedPolicy& p0 = std::get<ClippedPolicy>(c.policy);
    ClippedPolicy pi = p0;
    pi.set_params(curve.final_params);
    const double a = pi.eval_action(State::continuous(Vector()))(0);
    if (std::abs(a - optimum) <= 0.05) ++near;

    // sigma over the second half of the approach (after the critic warm-up)
    // versus the last 200 steps, spent in the flat region
    const auto& tr = curve.trace;
    std::size_t enter = tr.size();
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (tr[i].mean(0) >= 1.0) {
        enter = i;
        break;
      }
    }
    bool up = false;
    double before = NAN, after = NAN;
    if (enter < tr.size() && enter > 1 && tr.size() >= enter + 200) {
      const std::size_t lo = enter / 2;
      before = 0.0;
      for (std::size_t i = lo; i < enter; ++i) before += tr[i].sigma;
      before /= static_cast<double>(enter - lo);
      after = 0.0;
      for (std::size_t i = tr.size() - 200; i < tr.size(); ++i) after += tr[i].sigma;
      after /= 200.0;
      up = after > before;
    }
    if (up) ++boosted;
    report << "    seed " << seed << ": clip(mu) " << fmt(a) << ", sigma before " << fmt(before) << " after "
           << fmt(after) << '\n';
  }
  std::cout << report.str();
  const bool ok = near >= 9 && boosted >= 9;
  return {ok, std::to_string(near) + "/10 seeds with clipped mean within 0.05 of optimum " + fmt(optimum) +
                  " (need 9), sigma increase on entering the flat region in " + std::to_string(boosted) +
                  "/10 (need 9)"};
}

// Path enumeration of E[(sum_t gamma^t r_t)^2] to depth `depth`.
void enumerate_paths(const MRP& m, int s, int t, int depth, double prob, double disc, double ret, double noise,
                     double& acc) {
  ret += disc * m.reward_mean(s);
  noise += disc * disc * m.reward_var(s);
  if (t + 1 == depth) {
    acc += prob * (ret * ret + noise);
    return;
  }
  for (int j = 0; j < m.n_states(); ++j) {
    const double p = m.transition(s, j);
    if (p > 0.0) enumerate_paths(m, j, t + 1, depth, prob * p, disc * m.gamma, ret, noise, acc);
  }
}

// C10
Outcome tabular_machinery_check() {
  constexpr int kInstances = 20;
  double worst_norm = 0.0, worst_erg = 0.0, worst_eig = 0.0, worst_enum = 0.0;
  bool dominated_ok = true;
  for (int k = 0; k < kInstances; ++k) {
    const std::uint64_t seed = derive_seed(1010, static_cast<std::uint64_t>(k));
    Rng rng = make_rng(seed);
    const int ns = 2 + k % 3, na = 2 + k % 2;
    const double gamma = uniform(rng, 0.5, 0.9);
    const TabularMDP mdp = random_tabular_mdp(ns, na, gamma, seed);
    const SoftmaxPolicy pi = SoftmaxPolicy::tabular(ns, na, uniform_vector(rng, ns * na, -1.5, 1.5));
    const Matrix table = policy_table(pi, ns);
    const Vector rho = discounted_occupancy(mdp, table).rho;
    worst_norm = std::max(worst_norm, std::abs(rho.sum() - 1.0 / (1.0 - gamma)));

    const Vector f = uniform_vector(rng, ns, -1, 1);
    worst_eig = std::max(worst_eig, eigenfunction_residual(mdp, table, f));

    // discounted sum of f along sampled trajectories
    const int horizon = static_cast<int>(std::ceil(std::log(1e-10) / std::log(gamma)));
    const int n = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const Trajectory traj = sample_trajectory(mdp, pi, horizon, derive_seed(seed, 0xE6000000ULL + i));
      double g = 0.0;
      for (std::size_t t = 0; t < traj.steps.size(); ++t) g += traj.discount_weights[t] * f(traj.steps[t].state.index);
      sum += g;
      sum2 += g * g;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1));
    worst_erg = std::max(worst_erg, std::abs(mean - occupancy_expectation(mdp, table, f)) / se);

    // second moment against path enumeration
    const MRP mrp = random_mrp(3, uniform(rng, 0.15, 0.25), seed);
    const double rmax = mrp.reward_mean.cwiseAbs().maxCoeff() + std::sqrt(mrp.reward_var.maxCoeff());
    const int depth = static_cast<int>(std::ceil(std::log(1e-8 * (1.0 - mrp.gamma) / rmax) / std::log(mrp.gamma)));
    const Vector s2 = mrp_second_moment(mrp);
    for (int s = 0; s < 3; ++s) {
      double acc = 0.0;
      enumerate_paths(mrp, s, 0, depth, 1.0, 1.0, 0.0, 0.0, acc);
      worst_enum = std::max(worst_enum, std::abs(acc - s2(s)));
    }

    // dominated rewards give dominated values and second moments of nonnegative returns
    MRP lo = random_mrp(ns, gamma, seed ^ 0xABCDULL);
    lo.reward_mean = lo.reward_mean.cwiseAbs();
    MRP hi = lo;
    hi.reward_mean += uniform_vector(rng, ns, 0.0, 1.0);
    const Vector v_lo = mrp_value(lo), v_hi = mrp_value(hi);
    const Vector m_lo = mrp_second_moment(lo), m_hi = mrp_second_moment(hi);
    dominated_ok = dominated_ok && (v_hi - v_lo).minCoeff() >= 0.0 && (m_hi - m_lo).minCoeff() >= -1e-12;
  }
  const bool ok = worst_norm <= 1e-10 && worst_erg <= 3.0 && worst_eig <= 1e-9 && worst_enum <= 1e-6 && dominated_ok;
  std::ostringstream os;
  os << kInstances << " instances each: occupancy sum error " << fmt(worst_norm) << ", ergodic MC gap "
     << fmt(worst_erg) << " SE (need 3), eigenfunction residual " << fmt(worst_eig)
     << " (tol 1e-09), second moment vs enumeration " << fmt(worst_enum) << " (tol 1e-06), dominated monotone "
     << (dominated_ok ? "yes" : "no");
  return {ok, os.str()};
}

struct Criterion {
  const char* id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"C1", "estimator_agreement", estimator_agreement_check},
      {"C2", "general_pg_identity", general_pg_identity_check},
      {"C3", "trajectory_variance", trajectory_variance_check},
      {"C4", "exploration_limit", exploration_limit_check},
      {"C5", "gaussian_deterministic_equivalence", gpg_dpg_equivalence_check},
      {"C6", "entropy_identity", entropy_identity_acceptance},
      {"C7", "reparameterised_quadrature", reparameterisation_check},
      {"C8", "lqr_end_to_end", lqr_end_to_end_check},
      {"C9", "clipping_exploration_boost", clipping_check},
      {"C10", "tabular_machinery", tabular_machinery_check},
  };
  std::set<std::string> selected(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << c.id << ' ' << c.name << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << " ["
              << fmt(seconds_since(t0)) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
