#pragma once

#include <string>
#include <vector>

#include "epg/critics/critic.hpp"
#include "epg/policies/dirac.hpp"
#include "epg/policies/gaussian.hpp"
#include "epg/policies/softmax.hpp"

namespace epg {

// max over states of |mean block of the Gaussian closed form - Dirac gradient|.
// Throws ConfigError unless the Dirac action map matches the Gaussian mean map
// and both share the mean parameters.
double equivalence_check_gpg_dpg(const GaussianPolicy& policy, const DiracPolicy& dirac, const Critic& critic,
                                 const std::vector<State>& states);

struct LockstepResult {
  Vector gaussian_mean_params;
  Vector dirac_params;
  double max_param_deviation = 0.0;
};

// Applies step_size * gradient updates to the Gaussian mean parameters and the
// Dirac parameters side by side, step k using critics[k] at states[k].
LockstepResult lockstep_gpg_dpg(GaussianPolicy policy, DiracPolicy dirac, const std::vector<QuadricCritic>& critics,
                                const std::vector<State>& states, double step_size);

// max over states of |exact sum on the entropy-shifted tied critic +
// (1 - alpha) grad H|. Throws ConfigError unless the policy is tied.
double entropy_identity_check(const SoftmaxPolicy& policy, double alpha, const std::vector<State>& states);

struct AgreementConfig {
  int n_instances = 50;
  long mc_samples = 1000000;
  int gl_order = 32;
  double tolerance = 1e-6;
  double mc_se_factor = 4.0;
  std::uint64_t seed = 0;
};

// One row per (instance, estimator pair). Monte Carlo rows report the largest
// per-component |difference| / SE against mc_se_factor.
struct AgreementRow {
  int instance = 0;
  int dim = 0;
  std::string pair;
  double max_abs_diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Random Gaussian policies with affine state maps and quadric critics in
// d = 1, 2, 3 (cycling), comparing the closed form, the exponential-family
// form, Gauss-Legendre and Monte Carlo.
std::vector<AgreementRow> estimator_agreement(const AgreementConfig& config);

struct ReparamRow {
  int instance = 0;
  std::string squash;
  double max_abs_diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Squashed policies (sigmoid and exp, alternating) with critics quadric in
// the pre-squash coordinate: reparameterised closed form against
// Gauss-Legendre over the squashed action space.
std::vector<ReparamRow> reparameterisation_agreement(int n_instances, std::uint64_t seed, double tolerance = 1e-6);

struct TheoremRow {
  int mdp = 0;
  int theta = 0;
  int n_states = 0;
  int n_actions = 0;
  double residual = 0.0;
  double resolvent_gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Random tabular MDPs (<= 4 states, <= 3 actions) times random parameters.
std::vector<TheoremRow> theorem_table(int n_mdps, int n_thetas, std::uint64_t seed, double tolerance = 1e-4);

}  // namespace epg
