#include "epg/agents/variance.hpp"

#include <cmath>
#include <limits>

#include "epg/env/trajectory.hpp"
#include "epg/quadrature/evaluators.hpp"

namespace epg {

std::string EstimatorSpec::name() const {
  return std::string(kind == TrajectoryEstimator::spg ? "spg" : "epg") + "/" + to_string(baseline);
}

namespace {

constexpr std::uint64_t kPilotTag = 0x9110700000ULL;

struct Tables {
  int n_states = 0;
  int n_actions = 0;
  int n_params = 0;
  Matrix probs;                             // S x A
  Matrix q;                                 // S x A
  std::vector<std::vector<Vector>> score;   // [s][a]
  std::vector<Vector> exact;                // [s], exact sum with zero baseline
};

Tables build_tables(const TabularMDP& mdp, const SoftmaxPolicy& pi, const TabularQCritic& critic) {
  Tables t;
  t.n_states = mdp.n_states;
  t.n_actions = mdp.n_actions;
  t.n_params = pi.n_params();
  t.probs = policy_table(pi, mdp.n_states);
  t.q = critic.table();
  t.score.resize(static_cast<std::size_t>(mdp.n_states));
  for (int s = 0; s < mdp.n_states; ++s) {
    const State st = State::tabular(s);
    for (int a = 0; a < mdp.n_actions; ++a) t.score[s].push_back(pi.grad_log_prob(st, a).flat());
    t.exact.push_back(integrate_discrete(pi, critic, st).flat());
  }
  return t;
}

// x_k(s, a) for every parameter component k.
std::vector<Matrix> per_step_rewards(const Tables& t, const EstimatorSpec& e, const Vector& baseline) {
  std::vector<Matrix> x(static_cast<std::size_t>(t.n_params), Matrix::Zero(t.n_states, t.n_actions));
  for (int s = 0; s < t.n_states; ++s) {
    for (int a = 0; a < t.n_actions; ++a) {
      const Vector v = e.kind == TrajectoryEstimator::spg ? Vector(t.score[s][a] * (t.q(s, a) + baseline(s)))
                                                          : t.exact[s];
      for (int k = 0; k < t.n_params; ++k) x[k](s, a) = v(k);
    }
  }
  return x;
}

Vector trajectory_gradient(const Tables& t, const Trajectory& traj, const std::vector<Matrix>& x, bool discount) {
  Vector g = Vector::Zero(t.n_params);
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const double w = discount ? traj.discount_weights[i] : 1.0;
    const int s = traj.steps[i].state.index;
    const int a = traj.steps[i].action_index;
    for (int k = 0; k < t.n_params; ++k) g(k) += w * x[k](s, a);
  }
  return g;
}

bool action_independent(const TabularMDP& mdp) {
  for (const auto& p : mdp.transition) {
    for (int a = 1; a < p.rows(); ++a) {
      if ((p.row(a) - p.row(0)).cwiseAbs().maxCoeff() > 1e-14) return false;
    }
  }
  return true;
}

struct Prediction {
  Vector mean;
  double second_moment = 0.0;
  double cov_trace = 0.0;
};

Prediction predict(const TabularMDP& mdp, const Matrix& pi, const std::vector<Matrix>& x, bool use_mrp) {
  Prediction out;
  out.mean = Vector::Zero(static_cast<Eigen::Index>(x.size()));
  for (std::size_t k = 0; k < x.size(); ++k) {
    Vector w, s2;
    if (use_mrp) {
      MRP mrp;
      mrp.transition = mdp.policy_transition(pi);
      mrp.reward_mean = pi.cwiseProduct(x[k]).rowwise().sum();
      mrp.reward_var =
          (pi.cwiseProduct(x[k].cwiseAbs2()).rowwise().sum() - mrp.reward_mean.cwiseAbs2()).cwiseMax(0.0);
      mrp.initial = mdp.initial;
      mrp.gamma = mdp.gamma;
      w = mrp_value(mrp);
      s2 = mrp_second_moment(mrp);
    } else {
      std::tie(w, s2) = mdp_reward_moments(mdp, pi, x[k]);
    }
    const double m = mdp.initial.dot(w);
    const double m2 = mdp.initial.dot(s2);
    out.mean(static_cast<Eigen::Index>(k)) = m;
    out.second_moment += m2;
    out.cov_trace += m2 - m * m;
  }
  return out;
}

double mean_of(const Vector& v) { return v.mean(); }

double se_of(const Vector& v) {
  const auto n = static_cast<double>(v.size());
  if (v.size() < 2) return 0.0;
  const double var = (v.array() - v.mean()).square().sum() / (n - 1.0);
  return std::sqrt(var / n);
}

}  // namespace

VarianceReport variance_harness(const RunConfig& config, const std::vector<EstimatorSpec>& estimators,
                                long n_trajectories) {
  if (n_trajectories < 30) throw ConfigError("variance_harness: need at least 30 trajectories");
  if (estimators.empty()) throw ConfigError("variance_harness: no estimators given");
  const auto* mdp = std::get_if<TabularMDP>(&config.env);
  const auto* pi = std::get_if<SoftmaxPolicy>(&config.policy);
  const auto* critic = std::get_if<TabularQCritic>(&config.critic);
  if (!mdp || !pi || !critic) {
    throw ConfigError("variance_harness: needs a tabular env, a softmax policy and a tabular_q critic");
  }
  mdp->validate();
  if (pi->n_actions() != mdp->n_actions || critic->n_states() != mdp->n_states ||
      critic->n_actions() != mdp->n_actions) {
    throw ConfigError("variance_harness: policy/critic shapes do not match the MDP");
  }
  const Tables t = build_tables(*mdp, *pi, *critic);
  const bool discount = config.discount_gradient;
  const int np = t.n_params;

  // V(s) = E_pi Q(s, .)
  const Vector v_hat = t.probs.cwiseProduct(t.q).rowwise().sum();

  // best constant baseline from an independent pilot sample
  double best_constant = 0.0;
  {
    EstimatorSpec plain{TrajectoryEstimator::spg, BaselineKind::none};
    const auto x0 = per_step_rewards(t, plain, Vector::Zero(t.n_states));
    std::vector<Matrix> x1(static_cast<std::size_t>(np), Matrix::Zero(t.n_states, t.n_actions));
    for (int s = 0; s < t.n_states; ++s) {
      for (int a = 0; a < t.n_actions; ++a) {
        for (int k = 0; k < np; ++k) x1[k](s, a) = t.score[s][a](k);
      }
    }
    Matrix g0(n_trajectories, np), g1(n_trajectories, np);
    for (long i = 0; i < n_trajectories; ++i) {
      const Trajectory traj = sample_trajectory(*mdp, *pi, config.horizon,
                                                derive_seed(config.seed, kPilotTag + static_cast<std::uint64_t>(i)));
      g0.row(i) = trajectory_gradient(t, traj, x0, discount).transpose();
      g1.row(i) = trajectory_gradient(t, traj, x1, discount).transpose();
    }
    const Matrix c0 = g0.rowwise() - g0.colwise().mean();
    const Matrix c1 = g1.rowwise() - g1.colwise().mean();
    const double denom = c1.squaredNorm();
    if (denom > 0.0) best_constant = -c0.cwiseProduct(c1).sum() / denom;
  }

  const bool use_mrp = action_independent(*mdp);
  VarianceReport report;
  report.prediction_method = use_mrp ? "mrp" : "mdp";

  std::vector<std::vector<Matrix>> rewards;
  for (const auto& e : estimators) {
    Vector b = Vector::Zero(t.n_states);
    if (e.baseline == BaselineKind::value) b = -v_hat;
    if (e.baseline == BaselineKind::constant) b.setConstant(best_constant);
    rewards.push_back(per_step_rewards(t, e, b));
  }

  std::vector<Matrix> samples(estimators.size(), Matrix(n_trajectories, np));
  for (long i = 0; i < n_trajectories; ++i) {
    const Trajectory traj =
        sample_trajectory(*mdp, *pi, config.horizon, derive_seed(config.seed, static_cast<std::uint64_t>(i)));
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      samples[e].row(i) = trajectory_gradient(t, traj, rewards[e], discount).transpose();
    }
  }

  const double n = static_cast<double>(n_trajectories);
  const double bessel = n / (n - 1.0);
  std::vector<Vector> dev(estimators.size());
  for (std::size_t e = 0; e < estimators.size(); ++e) {
    const Matrix& g = samples[e];
    VarianceEntry entry;
    entry.estimator = estimators[e].name();
    entry.n = n_trajectories;
    entry.mean = g.colwise().mean().transpose();
    entry.mean_norm = entry.mean.norm();
    dev[e] = (g.rowwise() - entry.mean.transpose()).rowwise().squaredNorm();
    entry.cov_trace = bessel * mean_of(dev[e]);
    entry.se = bessel * se_of(dev[e]);
    const Vector sq = g.rowwise().squaredNorm();
    entry.second_moment = mean_of(sq);
    entry.second_moment_se = se_of(sq);
    entry.baseline_constant = estimators[e].baseline == BaselineKind::constant ? best_constant : 0.0;
    if (discount) {
      const Prediction p = predict(*mdp, t.probs, rewards[e], use_mrp);
      entry.predicted_mean = p.mean;
      entry.predicted_second_moment = p.second_moment;
      entry.predicted_cov_trace = p.cov_trace;
    } else {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      entry.predicted_mean = Vector::Constant(np, nan);
      entry.predicted_second_moment = nan;
      entry.predicted_cov_trace = nan;
    }
    report.entries.push_back(std::move(entry));
  }

  for (std::size_t a = 0; a < estimators.size(); ++a) {
    for (std::size_t b = a + 1; b < estimators.size(); ++b) {
      const Vector d = dev[a] - dev[b];
      report.comparisons.push_back(
          {report.entries[a].estimator, report.entries[b].estimator, bessel * mean_of(d), bessel * se_of(d)});
      const Matrix diff = samples[a] - samples[b];
      for (int k = 0; k < np; ++k) {
        const Vector col = diff.col(k);
        const double gap = std::abs(col.mean());
        const double se = se_of(col);
        double ratio = 0.0;
        if (se > 0.0) {
          ratio = gap / se;
        } else if (gap > 1e-12) {
          ratio = std::numeric_limits<double>::infinity();
        }
        report.max_mean_gap_se = std::max(report.max_mean_gap_se, ratio);
      }
    }
  }
  return report;
}

}  // namespace epg
