#include "epg/policies/squashed.hpp"

#include <cmath>
#include <numbers>

#include "epg/quadrature/rules.hpp"

namespace epg {

const char* to_string(Squash g) {
  switch (g) {
    case Squash::identity: return "identity";
    case Squash::sigmoid: return "sigmoid";
    case Squash::exp: return "exp";
  }
  return "identity";
}

Squash squash_from_string(const std::string& name) {
  if (name == "identity") return Squash::identity;
  if (name == "sigmoid") return Squash::sigmoid;
  if (name == "exp") return Squash::exp;
  throw ConfigError("unknown squash '" + name + "'");
}

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

double squash(Squash g, double b) {
  switch (g) {
    case Squash::identity: return b;
    case Squash::sigmoid: return b >= 0.0 ? 1.0 / (1.0 + std::exp(-b)) : std::exp(b) / (1.0 + std::exp(b));
    case Squash::exp: return std::exp(b);
  }
  return b;
}

double squash_derivative(Squash g, double b) {
  switch (g) {
    case Squash::identity: return 1.0;
    case Squash::sigmoid: {
      const double a = squash(g, b);
      return a * (1.0 - a);
    }
    case Squash::exp: return std::exp(b);
  }
  return 1.0;
}

Vector squash(Squash g, const Vector& b) {
  Vector a(b.size());
  for (int i = 0; i < b.size(); ++i) a(i) = squash(g, b(i));
  return a;
}

Vector unsquash(Squash g, const Vector& a) {
  Vector b(a.size());
  for (int i = 0; i < a.size(); ++i) {
    switch (g) {
      case Squash::identity:
        b(i) = a(i);
        break;
      case Squash::sigmoid:
        if (!(a(i) > 0.0 && a(i) < 1.0)) throw DomainError("unsquash(sigmoid): action must lie in (0, 1)");
        b(i) = std::log(a(i)) - std::log1p(-a(i));
        break;
      case Squash::exp:
        if (!(a(i) > 0.0)) throw DomainError("unsquash(exp): action must be positive");
        b(i) = std::log(a(i));
        break;
    }
  }
  return b;
}

double log_det_jacobian(Squash g, const Vector& b) {
  double v = 0.0;
  for (int i = 0; i < b.size(); ++i) {
    switch (g) {
      case Squash::identity: break;
      case Squash::sigmoid: v += -softplus(-b(i)) - softplus(b(i)); break;
      case Squash::exp: v += b(i); break;
    }
  }
  return v;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// ---------------------------------------------------------------- squashed

SquashedPolicy::SquashedPolicy(GaussianPolicy base, Squash g) : base_(std::move(base)), g_(g) {
  theta_ = base_.params();
}

void SquashedPolicy::set_params(const Vector& theta) {
  base_.set_params(theta);
  theta_ = theta;
}

ActionSample SquashedPolicy::sample(const State& s, Rng& rng) const {
  const ActionSample b = base_.sample(s, rng);
  return {squash(g_, b.action), b.action};
}

double SquashedPolicy::log_prob(const State& s, const Vector& a) const {
  const Vector b = unsquash(g_, a);
  return base_.log_prob(s, b) - log_det_jacobian(g_, b);
}

GradientEstimate SquashedPolicy::grad_log_prob(const State& s, const Vector& a) const {
  return base_.grad_log_prob(s, unsquash(g_, a));
}

namespace {

constexpr int kHermiteOrder = 100;

const QuadratureRule& hermite_rule() {
  static const QuadratureRule rule = gauss_hermite(kHermiteOrder);
  return rule;
}

}  // namespace

Vector SquashedPolicy::mean(const State& s) const {
  const Vector mu = base_.mu(s);
  if (g_ == Squash::identity) return mu;
  const Matrix l = base_.cov_factor(s);
  Vector m(mu.size());
  for (int i = 0; i < mu.size(); ++i) {
    const double sd = l.row(i).norm();
    if (g_ == Squash::exp) {
      m(i) = std::exp(mu(i) + 0.5 * sd * sd);
      continue;
    }
    const auto& rule = hermite_rule();
    double v = 0.0;
    for (int k = 0; k < rule.nodes.size(); ++k) v += rule.weights(k) * squash(g_, mu(i) + sd * rule.nodes(k));
    m(i) = v;
  }
  return m;
}

Matrix SquashedPolicy::mean_jacobian(const State& s) const {
  // b_i = mu_i + sd_i z with sd_i = |L_i.|, so
  // dE[g(b_i)]/dmu_i = E[g'(b_i)] and dE[g(b_i)]/dL_ij = E[g'(b_i) z] L_ij / sd_i.
  const int d = action_dim();
  const Vector mu = base_.mu(s);
  const Matrix l = base_.cov_factor(s);
  const Matrix j_mu = base_.mu_jacobian(s);
  const Matrix j_l = base_.cov_factor_jacobian(s);
  Matrix out = Matrix::Zero(d, n_params());
  const auto& rule = hermite_rule();
  for (int i = 0; i < d; ++i) {
    const double sd = l.row(i).norm();
    double e_deriv = 0.0;
    double e_deriv_z = 0.0;
    if (g_ == Squash::identity) {
      e_deriv = 1.0;
    } else if (g_ == Squash::exp) {
      e_deriv = std::exp(mu(i) + 0.5 * sd * sd);
      e_deriv_z = sd * e_deriv;
    } else {
      for (int k = 0; k < rule.nodes.size(); ++k) {
        const double gp = squash_derivative(g_, mu(i) + sd * rule.nodes(k));
        e_deriv += rule.weights(k) * gp;
        e_deriv_z += rule.weights(k) * gp * rule.nodes(k);
      }
    }
    out.row(i) += e_deriv * j_mu.row(i);
    if (sd > 0.0) {
      for (int j = 0; j < d; ++j) out.row(i) += e_deriv_z * l(i, j) / sd * j_l.row(i + j * d);
    }
  }
  return out;
}

// ---------------------------------------------------------------- clipped

ClippedPolicy::ClippedPolicy(GaussianPolicy base) : base_(std::move(base)) { theta_ = base_.params(); }

void ClippedPolicy::set_params(const Vector& theta) {
  base_.set_params(theta);
  theta_ = theta;
}

Vector ClippedPolicy::clip(const Vector& b) { return b.cwiseMax(0.0).cwiseMin(1.0); }

ActionSample ClippedPolicy::sample(const State& s, Rng& rng) const {
  const ActionSample b = base_.sample(s, rng);
  return {clip(b.action), b.action};
}

namespace {

bool on_bound(double a) { return a == 0.0 || a == 1.0; }

}  // namespace

double ClippedPolicy::log_prob(const State& s, const Vector& a) const {
  if (a.size() != action_dim()) throw ConfigError("ClippedPolicy: action dimension mismatch");
  if ((a.array() < 0.0).any() || (a.array() > 1.0).any()) throw DomainError("ClippedPolicy: action outside [0,1]^d");
  bool any_bound = false;
  for (int i = 0; i < a.size(); ++i) any_bound = any_bound || on_bound(a(i));
  if (!any_bound) return base_.log_prob(s, a);
  const Matrix l = base_.cov_factor(s);
  if (!l.isDiagonal(0.0)) throw DomainError("ClippedPolicy: mixed density needs a diagonal covariance factor");
  const Vector mu = base_.mu(s);
  double v = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    const double sd = std::abs(l(i, i));
    if (a(i) == 0.0) {
      v += std::log(normal_cdf(-mu(i) / sd));
    } else if (a(i) == 1.0) {
      v += std::log(normal_cdf((mu(i) - 1.0) / sd));
    } else {
      const double z = (a(i) - mu(i)) / sd;
      v += -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
    }
  }
  return v;
}

GradientEstimate ClippedPolicy::grad_log_prob(const State& s, const Vector& a) const {
  if (a.size() != action_dim()) throw ConfigError("ClippedPolicy: action dimension mismatch");
  bool any_bound = false;
  for (int i = 0; i < a.size(); ++i) any_bound = any_bound || on_bound(a(i));
  if (!any_bound) return base_.grad_log_prob(s, a);
  const int d = action_dim();
  const Matrix l = base_.cov_factor(s);
  if (!l.isDiagonal(0.0)) throw DomainError("ClippedPolicy: mixed density needs a diagonal covariance factor");
  const Vector mu = base_.mu(s);
  const Matrix j_mu = base_.mu_jacobian(s);
  const Matrix j_l = base_.cov_factor_jacobian(s);
  Vector g = Vector::Zero(n_params());
  for (int i = 0; i < d; ++i) {
    const double l_ii = l(i, i);
    const double sd = std::abs(l_ii);
    const double sign = l_ii >= 0.0 ? 1.0 : -1.0;
    double d_mu = 0.0;
    double d_sd = 0.0;
    if (a(i) == 0.0) {
      // log Phi(-mu/sd)
      const double x = -mu(i) / sd;
      const double h = normal_pdf(x) / normal_cdf(x);
      d_mu = -h / sd;
      d_sd = h * mu(i) / (sd * sd);
    } else if (a(i) == 1.0) {
      // log Phi((mu - 1)/sd)
      const double x = (mu(i) - 1.0) / sd;
      const double h = normal_pdf(x) / normal_cdf(x);
      d_mu = h / sd;
      d_sd = -h * x / sd;
    } else {
      const double z = (a(i) - mu(i)) / sd;
      d_mu = z / sd;
      d_sd = (z * z - 1.0) / sd;
    }
    g += d_mu * j_mu.row(i).transpose() + d_sd * sign * j_l.row(i + i * d).transpose();
  }
  return GradientEstimate(layout(), g, "score");
}

Vector ClippedPolicy::mean(const State& s) const {
  // E[clip(b, 0, 1)] for b ~ N(mu, sd^2) equals
  // int_0^1 P(b > t) dt = sd [psi((mu)/sd) - psi((mu - 1)/sd)] with psi(x) = x Phi(x) + phi(x).
  const Vector mu = base_.mu(s);
  const Matrix l = base_.cov_factor(s);
  Vector m(mu.size());
  for (int i = 0; i < mu.size(); ++i) {
    const double sd = l.row(i).norm();
    auto psi = [](double x) { return x * normal_cdf(x) + normal_pdf(x); };
    m(i) = sd * (psi(mu(i) / sd) - psi((mu(i) - 1.0) / sd));
  }
  return m;
}

Matrix ClippedPolicy::mean_jacobian(const State& s) const {
  // d/dmu = Phi(mu/sd) - Phi((mu-1)/sd); d/dsd = phi(mu/sd) - phi((mu-1)/sd)
  const int d = action_dim();
  const Vector mu = base_.mu(s);
  const Matrix l = base_.cov_factor(s);
  const Matrix j_mu = base_.mu_jacobian(s);
  const Matrix j_l = base_.cov_factor_jacobian(s);
  Matrix out = Matrix::Zero(d, n_params());
  for (int i = 0; i < d; ++i) {
    const double sd = l.row(i).norm();
    const double x0 = mu(i) / sd;
    const double x1 = (mu(i) - 1.0) / sd;
    out.row(i) += (normal_cdf(x0) - normal_cdf(x1)) * j_mu.row(i);
    const double d_sd = normal_pdf(x0) - normal_pdf(x1);
    for (int j = 0; j < d; ++j) out.row(i) += d_sd * l(i, j) / sd * j_l.row(i + j * d);
  }
  return out;
}

Matrix ClippedPolicy::atom_masses(const State& s) const {
  const Vector mu = base_.mu(s);
  const Matrix l = base_.cov_factor(s);
  Matrix m(mu.size(), 2);
  for (int i = 0; i < mu.size(); ++i) {
    const double sd = l.row(i).norm();
    m(i, 0) = normal_cdf(-mu(i) / sd);
    m(i, 1) = normal_cdf((mu(i) - 1.0) / sd);
  }
  return m;
}

}  // namespace epg
