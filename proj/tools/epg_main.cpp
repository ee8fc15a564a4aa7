#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "epg/agents/checks.hpp"
#include "epg/agents/config.hpp"
#include "epg/agents/runs.hpp"
#include "epg/agents/variance.hpp"

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw epg::ConfigError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::ostream& precise(std::ostream& os) { return os << std::setprecision(12); }

epg::RunConfig load(const std::string& path, std::optional<std::uint64_t> seed) {
  epg::RunConfig c = epg::load_run_config(path);
  if (seed) c.seed = *seed;
  return c;
}

std::vector<epg::EstimatorSpec> parse_estimators(const std::string& list) {
  std::vector<epg::EstimatorSpec> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto slash = item.find('/');
    const std::string kind = item.substr(0, slash);
    const std::string base = slash == std::string::npos ? "none" : item.substr(slash + 1);
    epg::EstimatorSpec e;
    if (kind == "spg") {
      e.kind = epg::TrajectoryEstimator::spg;
    } else if (kind == "epg") {
      e.kind = epg::TrajectoryEstimator::epg;
    } else {
      throw epg::ConfigError("unknown trajectory estimator '" + kind + "' (expected spg or epg)");
    }
    e.baseline = epg::baseline_from_string(base);
    out.push_back(e);
  }
  return out;
}

int cmd_train(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out_path,
              const std::string& trace_path) {
  const epg::RunConfig c = load(config, seed);
  const epg::LearningCurve curve = epg::run(c);
  Output out(out_path);
  auto& os = precise(out.stream());
  os << "step,eval_return,sigma_summary\n";
  for (const auto& p : curve.points) os << p.step << ',' << p.eval_return << ',' << p.sigma_summary << '\n';
  if (!trace_path.empty()) {
    std::ofstream tr(trace_path);
    if (!tr) throw epg::ConfigError("cannot open trace file '" + trace_path + "'");
    precise(tr) << "step,sigma,mean0,reward,phases\n";
    for (const auto& r : curve.trace) {
      tr << r.step << ',' << r.sigma << ',' << (r.mean.size() > 0 ? r.mean(0) : 0.0) << ',' << r.reward << ',';
      for (std::size_t i = 0; i < r.phases.size(); ++i) tr << (i ? ";" : "") << epg::to_string(r.phases[i]);
      tr << '\n';
    }
  }
  for (const auto& e : curve.events) std::cerr << "note: " << e << '\n';
  return 0;
}

int cmd_variance(const std::string& config, std::optional<std::uint64_t> seed, long n, const std::string& estimators,
                 double se_factor, const std::string& out_path) {
  const epg::RunConfig c = load(config, seed);
  const epg::VarianceReport r = epg::variance_harness(c, parse_estimators(estimators), n);
  Output out(out_path);
  auto& os = precise(out.stream());
  os << "estimator,mean_norm,cov_trace,se,n\n";
  for (const auto& e : r.entries) os << e.estimator << ',' << e.mean_norm << ',' << e.cov_trace << ',' << e.se << ',' << e.n << '\n';

  bool ok = r.max_mean_gap_se <= se_factor;
  precise(std::cerr) << "mean agreement: max pairwise gap " << r.max_mean_gap_se << " SE (limit " << se_factor
                     << ")\n";
  for (const auto& e : r.entries) {
    const double gap = std::abs(e.second_moment - e.predicted_second_moment);
    const bool match = !(gap > se_factor * e.second_moment_se);
    ok = ok && match;
    std::cerr << e.estimator << ": second moment " << e.second_moment << " +- " << e.second_moment_se
              << ", predicted (" << r.prediction_method << ") " << e.predicted_second_moment
              << (match ? "" : "  MISMATCH") << '\n';
  }
  for (const auto& cmp : r.comparisons) {
    std::cerr << cmp.a << " - " << cmp.b << ": cov_trace difference " << cmp.difference << " +- " << cmp.se << '\n';
  }
  return ok ? 0 : kExitCheckFailed;
}

int cmd_check_quadrature(int instances, int reparam_instances, long mc_samples, std::uint64_t seed, double tol,
                         const std::string& out_path) {
  epg::AgreementConfig cfg;
  cfg.n_instances = instances;
  cfg.mc_samples = mc_samples;
  cfg.seed = seed;
  cfg.tolerance = tol;
  Output out(out_path);
  auto& os = precise(out.stream());
  os << "instance,estimator_pair,max_abs_diff,tolerance,pass\n";
  bool ok = true;
  for (const auto& r : epg::estimator_agreement(cfg)) {
    os << r.instance << ',' << r.pair << ',' << r.max_abs_diff << ',' << r.tolerance << ',' << (r.pass ? 1 : 0) << '\n';
    ok = ok && r.pass;
  }
  for (const auto& r : epg::reparameterisation_agreement(reparam_instances, seed, tol)) {
    os << r.instance << ",reparameterised-vs-gauss_legendre[" << r.squash << "]," << r.max_abs_diff << ','
       << r.tolerance << ',' << (r.pass ? 1 : 0) << '\n';
    ok = ok && r.pass;
  }
  return ok ? 0 : kExitCheckFailed;
}

int cmd_check_theorem(int mdps, int thetas, std::uint64_t seed, double tol, const std::string& out_path) {
  Output out(out_path);
  auto& os = precise(out.stream());
  os << "mdp,theta,n_states,n_actions,residual,resolvent_gap,tolerance,pass\n";
  bool ok = true;
  for (const auto& r : epg::theorem_table(mdps, thetas, seed, tol)) {
    os << r.mdp << ',' << r.theta << ',' << r.n_states << ',' << r.n_actions << ',' << r.residual << ','
       << r.resolvent_gap << ',' << r.tolerance << ',' << (r.pass ? 1 : 0) << '\n';
    ok = ok && r.pass;
  }
  return ok ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expected policy gradient estimators and learning harness"};
  app.require_subcommand(1);

  std::string config, out_path = "-", trace_path;
  std::optional<std::uint64_t> seed;

  auto* train = app.add_subcommand("train", "Run a learning loop and print the learning curve as CSV");
  train->add_option("-c,--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  train->add_option("--seed", seed, "Override the configured seed");
  train->add_option("-o,--out", out_path, "CSV output path (default stdout)");
  train->add_option("--trace", trace_path, "Write the per-step trace CSV here");

  long n_traj = 1000;
  std::string estimators = "spg/none,spg/value,spg/constant,epg/none";
  double se_factor = 4.0;
  auto* variance = app.add_subcommand("variance", "Measure trajectory-gradient variance of fixed snapshots");
  variance->add_option("-c,--config", config, "JSON run configuration (tabular)")->required()->check(CLI::ExistingFile);
  variance->add_option("--seed", seed, "Override the configured seed");
  variance->add_option("-n,--trajectories", n_traj, "Number of trajectories")->check(CLI::PositiveNumber);
  variance->add_option("--estimators", estimators, "Comma list of spg|epg[/none|value|constant]");
  variance->add_option("--se-factor", se_factor, "Agreement limit in standard errors");
  variance->add_option("-o,--out", out_path, "CSV output path (default stdout)");

  int instances = 50, reparam_instances = 20;
  long mc_samples = 1000000;
  double quad_tol = 1e-6;
  std::uint64_t check_seed = 0;
  auto* quad = app.add_subcommand("check-quadrature", "Cross-check the inner-integral estimators");
  quad->add_option("--instances", instances, "Random Gaussian/quadric instances");
  quad->add_option("--reparam-instances", reparam_instances, "Random squashed instances");
  quad->add_option("--mc-samples", mc_samples, "Monte Carlo samples per instance (0 skips)");
  quad->add_option("--tolerance", quad_tol, "Absolute tolerance for exact estimator pairs");
  quad->add_option("--seed", check_seed, "Instance generator seed");
  quad->add_option("-o,--out", out_path, "CSV output path (default stdout)");

  int mdps = 10, thetas = 10;
  double thm_tol = 1e-4;
  auto* thm = app.add_subcommand("check-theorem", "Check the general policy-gradient identity on random MDPs");
  thm->add_option("--mdps", mdps, "Random MDPs");
  thm->add_option("--thetas", thetas, "Random parameter vectors per MDP");
  thm->add_option("--tolerance", thm_tol, "Relative residual tolerance");
  thm->add_option("--seed", check_seed, "Instance generator seed");
  thm->add_option("-o,--out", out_path, "CSV output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(config, seed, out_path, trace_path);
    if (*variance) return cmd_variance(config, seed, n_traj, estimators, se_factor, out_path);
    if (*quad) return cmd_check_quadrature(instances, reparam_instances, mc_samples, check_seed, quad_tol, out_path);
    if (*thm) return cmd_check_theorem(mdps, thetas, check_seed, thm_tol, out_path);
  } catch (const epg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
