#include "epg/policies/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace epg {

void Policy::set_params(const Vector& theta) {
  if (theta.size() != theta_.size()) {
    throw ConfigError(class_name() + ": expected " + std::to_string(theta_.size()) + " parameters, got " +
                      std::to_string(theta.size()));
  }
  theta_ = theta;
}

ActionSample Policy::sample(const State& s, std::uint64_t seed) const {
  Rng rng = make_rng(seed);
  return sample(s, rng);
}

const char* to_string(CovarianceMode mode) {
  return mode == CovarianceMode::learned ? "learned" : "hessian-derived";
}

CovarianceMode covariance_mode_from_string(const std::string& name) {
  if (name == "learned") return CovarianceMode::learned;
  if (name == "hessian-derived" || name == "hessian_derived") return CovarianceMode::hessian_derived;
  throw ConfigError("unknown covariance_mode '" + name + "'");
}

void check_cov_factor(const Matrix& cov_factor) {
  if (cov_factor.rows() != cov_factor.cols()) throw ConfigError("covariance factor must be square");
  if (!(std::abs(cov_factor.determinant()) > 1e-12)) {
    throw DomainError("covariance factor is (numerically) singular: |det| <= 1e-12");
  }
}

GaussianPolicy::GaussianPolicy(LinearMap mean_map, LinearMap cov_map, Vector theta, CovarianceMode mode)
    : mean_map_(std::move(mean_map)), cov_map_(std::move(cov_map)), dim_(mean_map_.out_dim()), mode_(mode) {
  if (cov_map_.out_dim() != dim_ * dim_) {
    throw ConfigError("GaussianPolicy: cov_map must output d*d entries (d = " + std::to_string(dim_) + ")");
  }
  if (theta.size() != mean_map_.n_params() + cov_map_.n_params()) {
    throw ConfigError("GaussianPolicy: expected " + std::to_string(mean_map_.n_params() + cov_map_.n_params()) +
                      " parameters, got " + std::to_string(theta.size()));
  }
  theta_ = std::move(theta);
}

GaussianPolicy GaussianPolicy::constant(const Vector& mu, const Matrix& cov_factor) {
  const int d = static_cast<int>(mu.size());
  if (cov_factor.rows() != d || cov_factor.cols() != d) throw ConfigError("GaussianPolicy: factor shape mismatch");
  Vector theta(d + d * d);
  theta.head(d) = mu;
  theta.tail(d * d) = Eigen::Map<const Vector>(cov_factor.data(), d * d);
  return GaussianPolicy(LinearMap::constant(d), LinearMap::constant(d * d), theta);
}

ParamLayout GaussianPolicy::layout() const {
  return {{"mean", 0, n_mean_params()}, {"cov", n_mean_params(), n_cov_params()}};
}

void GaussianPolicy::set_covariance_override(const Matrix& cov_factor) {
  if (cov_factor.rows() != dim_ || cov_factor.cols() != dim_) {
    throw ConfigError("GaussianPolicy: covariance override has the wrong shape");
  }
  override_ = cov_factor;
}

Vector GaussianPolicy::mu(const State& s) const { return mean_map_.eval(theta_.head(n_mean_params()), s); }

Matrix GaussianPolicy::cov_factor(const State& s) const {
  if (override_) return *override_;
  const Vector v = cov_map_.eval(theta_.tail(n_cov_params()), s);
  return Eigen::Map<const Matrix>(v.data(), dim_, dim_);
}

Matrix GaussianPolicy::covariance(const State& s) const {
  const Matrix l = cov_factor(s);
  return l * l.transpose();
}

Matrix GaussianPolicy::mu_jacobian(const State& s) const {
  Matrix j = Matrix::Zero(dim_, n_params());
  j.leftCols(n_mean_params()) = mean_map_.jacobian(s);
  return j;
}

Matrix GaussianPolicy::cov_factor_jacobian(const State& s) const {
  Matrix j = Matrix::Zero(dim_ * dim_, n_params());
  if (!override_) j.rightCols(n_cov_params()) = cov_map_.jacobian(s);
  return j;
}

ActionSample GaussianPolicy::sample(const State& s, Rng& rng) const {
  const Matrix l = cov_factor(s);
  check_cov_factor(l);
  Vector a = mu(s) + l * standard_normal(dim_, rng);
  return {a, a};
}

double GaussianPolicy::log_prob(const State& s, const Vector& a) const {
  if (a.size() != dim_) throw ConfigError("GaussianPolicy: action dimension mismatch");
  return GaussianScore(*this, s).log_prob(a);
}

GradientEstimate GaussianPolicy::grad_log_prob(const State& s, const Vector& a) const {
  if (a.size() != dim_) throw ConfigError("GaussianPolicy: action dimension mismatch");
  return GradientEstimate(layout(), GaussianScore(*this, s).score(a), "score");
}

GaussianScore::GaussianScore(const GaussianPolicy& policy, const State& s)
    : mu_(policy.mu(s)), l_(policy.cov_factor(s)) {
  check_cov_factor(l_);
  const int d = static_cast<int>(mu_.size());
  Eigen::PartialPivLU<Matrix> lu(l_);
  l_inv_ = lu.inverse();
  l_inv_t_ = l_inv_.transpose();
  j_mu_t_ = policy.mu_jacobian(s).transpose();
  j_l_t_ = policy.cov_factor_jacobian(s).transpose();
  log_norm_ = -std::log(std::abs(lu.determinant())) - 0.5 * d * std::log(2.0 * std::numbers::pi);
}

double GaussianScore::log_prob(const Vector& a) const {
  const Vector z = l_inv_ * (a - mu_);
  return -0.5 * z.squaredNorm() + log_norm_;
}

Vector GaussianScore::score(const Vector& a) const {
  const int d = static_cast<int>(mu_.size());
  const Vector z = l_inv_ * (a - mu_);
  const Vector g_mu = l_inv_t_ * z;
  Matrix zz = z * z.transpose();
  zz.diagonal().array() -= 1.0;
  const Matrix g_l = l_inv_t_ * zz;
  return j_mu_t_ * g_mu + j_l_t_ * Eigen::Map<const Vector>(g_l.data(), d * d);
}

}  // namespace epg
