#pragma once

#include <string>
#include <vector>

#include "epg/agents/config.hpp"

namespace epg {

enum class TrajectoryEstimator { spg, epg };

struct EstimatorSpec {
  TrajectoryEstimator kind = TrajectoryEstimator::epg;
  BaselineKind baseline = BaselineKind::none;

  std::string name() const;
};

struct VarianceEntry {
  std::string estimator;
  long n = 0;
  Vector mean;
  double mean_norm = 0.0;
  // trace of the sample covariance of the trajectory gradient, and its SE
  double cov_trace = 0.0;
  double se = 0.0;
  // E|G|^2 (empirical) with its SE and the analytic prediction
  double second_moment = 0.0;
  double second_moment_se = 0.0;
  double predicted_second_moment = 0.0;
  Vector predicted_mean;
  double predicted_cov_trace = 0.0;
  // baseline value used by a constant baseline
  double baseline_constant = 0.0;
};

// Paired difference cov_trace(a) - cov_trace(b) over identical trajectories.
struct VarianceComparison {
  std::string a;
  std::string b;
  double difference = 0.0;
  double se = 0.0;
};

struct VarianceReport {
  std::vector<VarianceEntry> entries;
  std::vector<VarianceComparison> comparisons;
  // "mrp" when transitions ignore the action, "mdp" otherwise
  std::string prediction_method;
  // largest pairwise |mean_a - mean_b| / SE over all components
  double max_mean_gap_se = 0.0;
};

// Trajectory gradients sum_t w_t x_t of a fixed softmax policy and tabular
// critic, estimated on n_trajectories shared trajectories. w_t = gamma^t when
// config.discount_gradient is set, 1 otherwise. Throws ConfigError for
// n_trajectories < 30 or a non-tabular config.
VarianceReport variance_harness(const RunConfig& config, const std::vector<EstimatorSpec>& estimators,
                                long n_trajectories);

}  // namespace epg
