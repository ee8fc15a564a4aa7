#include "epg/quadrature/theorem.hpp"

namespace epg {

ValueDerivatives value_derivatives(const TabularMDP& mdp, const SoftmaxPolicy& policy) {
  const int ns = mdp.n_states;
  const int na = mdp.n_actions;
  const int np = policy.n_params();
  const double g = mdp.gamma;
  const Matrix pi = policy_table(policy, ns);
  const Matrix p_pi = mdp.policy_transition(pi);
  const Vector v = policy_values(mdp, pi);
  Eigen::FullPivLU<Matrix> resolvent(Matrix::Identity(ns, ns) - g * p_pi);

  // d pi(s, .)/d theta_k = pi .* (dz - pi . dz)
  std::vector<Matrix> dpi(ns);
  for (int s = 0; s < ns; ++s) {
    const Matrix jz = policy.logits_jacobian(State::tabular(s));
    const Vector p = pi.row(s).transpose();
    dpi[s] = p.asDiagonal() * (jz - Vector::Ones(na) * (p.transpose() * jz));
  }

  ValueDerivatives out;
  Matrix rhs(ns, np);
  for (int k = 0; k < np; ++k) {
    for (int s = 0; s < ns; ++s) {
      const Vector dp = dpi[s].col(k);
      rhs(s, k) = dp.dot(mdp.reward.row(s).transpose()) + g * dp.dot(mdp.transition[s] * v);
    }
  }
  out.dV = resolvent.solve(rhs);
  for (int s = 0; s < ns; ++s) out.dQ.push_back(g * mdp.transition[s] * out.dV);
  return out;
}

GeneralPgCheck general_pg_check(const TabularMDP& mdp, const SoftmaxPolicy& policy, double epsilon) {
  mdp.validate();
  if (policy.n_actions() != mdp.n_actions) throw ConfigError("general_pg_check: action count mismatch");
  const int ns = mdp.n_states;
  const int np = policy.n_params();
  const Matrix pi = policy_table(policy, ns);
  const Vector rho = discounted_occupancy(mdp, pi).rho;
  const ValueDerivatives dv = value_derivatives(mdp, policy);

  Vector grad = Vector::Zero(np);
  for (int s = 0; s < ns; ++s) {
    const Vector i_g = dv.dV.row(s).transpose() - dv.dQ[s].transpose() * pi.row(s).transpose();
    grad += rho(s) * i_g;
  }

  GeneralPgCheck out;
  out.theorem_gradient = GradientEstimate(policy.layout(), grad, "general_pg");
  out.finite_difference = finite_difference_grad_J(mdp, policy, epsilon);
  const double fd_norm = out.finite_difference.flat().norm();
  const double gap = (grad - out.finite_difference.flat()).norm();
  out.residual = fd_norm > 0.0 ? gap / fd_norm : gap;

  // cross-check the resolvent derivatives against central differences
  SoftmaxPolicy probe = policy;
  const Vector theta = policy.params();
  double worst = 0.0;
  for (int k = 0; k < np; ++k) {
    Vector t = theta;
    t(k) += epsilon;
    probe.set_params(t);
    const Matrix pi_up = policy_table(probe, ns);
    const Vector v_up = policy_values(mdp, pi_up);
    const Matrix q_up = action_values(mdp, pi_up);
    t(k) = theta(k) - epsilon;
    probe.set_params(t);
    const Matrix pi_down = policy_table(probe, ns);
    const Vector v_down = policy_values(mdp, pi_down);
    const Matrix q_down = action_values(mdp, pi_down);
    worst = std::max(worst, ((v_up - v_down) / (2.0 * epsilon) - dv.dV.col(k)).cwiseAbs().maxCoeff());
    for (int s = 0; s < ns; ++s) {
      const Vector fd_q = (q_up.row(s) - q_down.row(s)).transpose() / (2.0 * epsilon);
      worst = std::max(worst, (fd_q - dv.dQ[s].col(k)).cwiseAbs().maxCoeff());
    }
  }
  out.resolvent_gap = worst;
  return out;
}

double general_pg_residual(const TabularMDP& mdp, const SoftmaxPolicy& policy) {
  return general_pg_check(mdp, policy).residual;
}

}  // namespace epg
