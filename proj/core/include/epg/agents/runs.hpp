#pragma once

#include <map>
#include <string>
#include <vector>

#include "epg/agents/config.hpp"

namespace epg {

struct CurvePoint {
  long step = 0;
  double eval_return = 0.0;
  double sigma_summary = 0.0;
};

enum class Phase : std::uint8_t { gradient, actor_update, covariance, act, env_step, critic_update };

const char* to_string(Phase p);

struct StepRecord {
  long step = 0;
  // exploration scale of the distribution used for acting
  double sigma = 0.0;
  // policy mean (noise-free action) at the visited state, before acting
  Vector mean;
  double reward = 0.0;
  std::vector<Phase> phases;
};

struct LearningCurve {
  std::vector<CurvePoint> points;
  std::vector<StepRecord> trace;
  Vector final_params;
  Vector final_critic_params;
  // counters such as "fit_fallbacks"
  std::map<std::string, double> diagnostics;
  // human-readable log of fallbacks and warnings
  std::vector<std::string> events;
};

LearningCurve run_epg(const RunConfig& config);
LearningCurve run_gpg(const RunConfig& config);
LearningCurve run_clipped(const RunConfig& config);
LearningCurve run_offpolicy_epg(const RunConfig& config);
LearningCurve run_spg(const RunConfig& config);
LearningCurve run_dpg(const RunConfig& config);

// Dispatches on config.algorithm.
LearningCurve run(const RunConfig& config);

// Deterministic evaluation of the current policy: exact J for tabular MDPs,
// averaged noise-free rollouts otherwise.
double evaluate_policy(const RunConfig& config, const PolicySpec& policy, std::uint64_t seed);

}  // namespace epg
