#pragma once

#include <functional>
#include <vector>

#include "epg/critics/critic.hpp"
#include "epg/critics/local_fit.hpp"
#include "epg/critics/tabular.hpp"
#include "epg/gradient.hpp"
#include "epg/policies/dirac.hpp"
#include "epg/policies/expfam.hpp"
#include "epg/policies/gaussian.hpp"
#include "epg/policies/softmax.hpp"
#include "epg/policies/squashed.hpp"

namespace epg {

// Evaluators of the per-state integral  int pi(a|s) grad log pi(a|s) Q(a, s) da.
// Every evaluator returns blocks laid out like the policy's parameters.

using Baseline = std::function<double(const State&)>;

// Gaussian policy, quadric critic:
//   mean block  J_mu^T (2 A mu + B)
//   cov block   J_L^T vec(2 A L)
GradientEstimate integrate_gaussian_quadric(const GaussianPolicy& policy, const Critic& critic, const State& s);
GradientEstimate integrate_gaussian_quadric(const GaussianPolicy& policy, const QuadricCoeffs& q, const State& s);

// Gaussian policy, arbitrary critic: quadric fitted around mu_s, then the
// closed form above. Records the fit residual in diagnostics["fit_residual_rms"].
GradientEstimate integrate_gaussian_general(const GaussianPolicy& policy, const Critic& critic, const State& s,
                                            const FitConfig& fit = {});

// Exponential family with polynomial sufficient statistics and a polynomial
// critic: J_eta^T E[T Q] - grad U E[Q], with expectations from the moment
// engine.
GradientEstimate integrate_expfam_polynomial(const ExpFamilyPolicy& policy, const Critic& critic, const State& s);
GradientEstimate integrate_expfam_polynomial(const GaussianPolicy& policy, const Critic& critic, const State& s);

enum class CriticCoordinates { pre_squash, post_squash };

// Squashed policy with the critic expressed in pre-squash coordinates,
// Q_b(b) = Q(g(b)); evaluated with the base policy's analytic evaluator.
GradientEstimate integrate_reparameterised(const SquashedPolicy& policy, const Critic& critic_b, const State& s,
                                           CriticCoordinates coords = CriticCoordinates::pre_squash);

// Linear critic Q = A_s^T a: A_s^T grad_theta E[a].
GradientEstimate integrate_linear(const Policy& policy, const Critic& critic, const State& s);

// Exact sum over a finite action set.
GradientEstimate integrate_discrete(const SoftmaxPolicy& policy, const DiscreteCritic& critic, const State& s,
                                    double baseline = 0.0);

// Mean of n score-weighted samples grad log pi(a) (Q(a) + b(s)). Reports the
// per-sample variance (trace) and per-component standard errors.
GradientEstimate integrate_monte_carlo(const Policy& policy, const Critic& critic, const State& s, long n,
                                       const Baseline& baseline, std::uint64_t seed);
GradientEstimate integrate_monte_carlo(const SoftmaxPolicy& policy, const DiscreteCritic& critic, const State& s,
                                       long n, const Baseline& baseline, std::uint64_t seed);

// Deterministic policy: J_pi^T grad_a Q at a = pi(s). Non-polynomial critics
// use the gradient of a local quadric fit.
GradientEstimate integrate_dirac(const DiracPolicy& policy, const Critic& critic, const State& s,
                                 const FitConfig& fit = {});

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Tensor-product Gauss-Legendre quadrature (d <= 3) with `panels` equal
// sub-intervals per dimension.
GradientEstimate integrate_gauss_legendre(const Policy& policy, const Critic& critic, const State& s, int order,
                                          const std::vector<Interval>& bounds, int panels = 1);

// mu_i +- width * sd_i per coordinate.
std::vector<Interval> gaussian_bounds(const GaussianPolicy& policy, const State& s, double width = 8.0);

// Largest admissible mass of a policy outside the integration box.
inline constexpr double kMaxOutsideMass = 1e-8;

}  // namespace epg
