#include "epg/critics/critic.hpp"

#include <cmath>
#include <numbers>

namespace epg {

PolyCoeffs QuadricCoeffs::to_poly() const {
  const int d = static_cast<int>(B.size());
  PolyCoeffs p = PolyCoeffs::constant(d, c);
  for (int i = 0; i < d; ++i) {
    p = p + PolyCoeffs::variable(d, i) * B(i);
    for (int j = 0; j < d; ++j) {
      p = p + poly_mul(PolyCoeffs::variable(d, i), PolyCoeffs::variable(d, j)) * A(i, j);
    }
  }
  return p;
}

QuadricCoeffs QuadricCoeffs::from_poly(const PolyCoeffs& p) {
  const int d = p.dim();
  QuadricCoeffs q{Matrix::Zero(d, d), Vector::Zero(d), 0.0};
  for (const auto& [m, c] : p.terms()) {
    const int deg = total_degree(m);
    if (deg > 2 && c != 0.0) throw ConfigError("QuadricCoeffs: polynomial has degree > 2");
    if (deg == 0) {
      q.c += c;
    } else if (deg == 1) {
      for (int i = 0; i < d; ++i) {
        if (m[i] == 1) q.B(i) += c;
      }
    } else if (deg == 2) {
      std::vector<int> idx;
      for (int i = 0; i < d; ++i) {
        for (int k = 0; k < m[i]; ++k) idx.push_back(i);
      }
      if (idx[0] == idx[1]) {
        q.A(idx[0], idx[0]) += c;
      } else {
        q.A(idx[0], idx[1]) += 0.5 * c;
        q.A(idx[1], idx[0]) += 0.5 * c;
      }
    }
  }
  return q;
}

Vector Critic::action_gradient(const State& s, const Vector& a) const {
  const double h = 1e-6;
  Vector g(a.size());
  Vector ap = a;
  for (int i = 0; i < a.size(); ++i) {
    ap(i) = a(i) + h;
    const double up = value(s, ap);
    ap(i) = a(i) - h;
    const double down = value(s, ap);
    ap(i) = a(i);
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

void ParametricCritic::set_params(const Vector& theta) {
  if (theta.size() != theta_.size()) {
    throw ConfigError(class_name() + ": expected " + std::to_string(theta_.size()) + " parameters, got " +
                      std::to_string(theta.size()));
  }
  theta_ = theta;
}

// ---------------------------------------------------------------- quadric

QuadricCritic::QuadricCritic(LinearMap a_map, LinearMap b_map, LinearMap c_map, Vector theta)
    : a_map_(std::move(a_map)), b_map_(std::move(b_map)), c_map_(std::move(c_map)), dim_(b_map_.out_dim()) {
  if (a_map_.out_dim() != dim_ * dim_) throw ConfigError("QuadricCritic: A map must output d*d entries");
  if (c_map_.out_dim() != 1) throw ConfigError("QuadricCritic: c map must be scalar");
  const int n = a_map_.n_params() + b_map_.n_params() + c_map_.n_params();
  if (theta.size() != n) {
    throw ConfigError("QuadricCritic: expected " + std::to_string(n) + " parameters, got " +
                      std::to_string(theta.size()));
  }
  theta_ = std::move(theta);
}

QuadricCritic QuadricCritic::constant(const Matrix& A, const Vector& B, double c) {
  const int d = static_cast<int>(B.size());
  if (A.rows() != d || A.cols() != d) throw ConfigError("QuadricCritic: A shape mismatch");
  Vector theta(d * d + d + 1);
  theta.head(d * d) = Eigen::Map<const Vector>(A.data(), d * d);
  theta.segment(d * d, d) = B;
  theta(d * d + d) = c;
  return QuadricCritic(LinearMap::constant(d * d), LinearMap::constant(d), LinearMap::constant(1), theta);
}

QuadricCoeffs QuadricCritic::coeffs(const State& s) const {
  const int na = a_map_.n_params();
  const int nb = b_map_.n_params();
  const Vector av = a_map_.eval(theta_.head(na), s);
  const Matrix m = Eigen::Map<const Matrix>(av.data(), dim_, dim_);
  return {0.5 * (m + m.transpose()), b_map_.eval(theta_.segment(na, nb), s),
          c_map_.eval(theta_.tail(c_map_.n_params()), s)(0)};
}

Vector QuadricCritic::param_gradient(const State& s, const Vector& a) const {
  const int na = a_map_.n_params();
  const int nb = b_map_.n_params();
  Vector g(n_params());
  const Matrix aa = a * a.transpose();
  g.head(na) = a_map_.jacobian(s).transpose() * Eigen::Map<const Vector>(aa.data(), dim_ * dim_);
  g.segment(na, nb) = b_map_.jacobian(s).transpose() * a;
  g.tail(c_map_.n_params()) = c_map_.jacobian(s).row(0).transpose();
  return g;
}

// ---------------------------------------------------------------- polynomial

PolynomialCritic::PolynomialCritic(int dim, int degree_bound, LinearMap coeff_map, Vector theta)
    : dim_(dim), degree_(degree_bound), monomials_(monomials_up_to(dim, degree_bound)), map_(std::move(coeff_map)) {
  if (map_.out_dim() != static_cast<int>(monomials_.size())) {
    throw ConfigError("PolynomialCritic: coefficient map must output " + std::to_string(monomials_.size()) +
                      " entries");
  }
  if (theta.size() != map_.n_params()) throw ConfigError("PolynomialCritic: parameter count mismatch");
  theta_ = std::move(theta);
}

PolynomialCritic PolynomialCritic::constant(const PolyCoeffs& p, int degree_bound) {
  if (p.degree() > degree_bound) throw ConfigError("PolynomialCritic: polynomial exceeds degree bound");
  const auto mons = monomials_up_to(p.dim(), degree_bound);
  Vector theta(mons.size());
  for (std::size_t i = 0; i < mons.size(); ++i) theta(static_cast<int>(i)) = p.coeff(mons[i]);
  return PolynomialCritic(p.dim(), degree_bound, LinearMap::constant(static_cast<int>(mons.size())), theta);
}

PolyCoeffs PolynomialCritic::coeffs(const State& s) const {
  const Vector c = map_.eval(theta_, s);
  PolyCoeffs p(dim_);
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    if (c(static_cast<int>(i)) != 0.0) p.add_term(monomials_[i], c(static_cast<int>(i)));
  }
  return p;
}

std::optional<QuadricCoeffs> PolynomialCritic::quadric(const State& s) const {
  const PolyCoeffs p = coeffs(s);
  if (p.degree() > 2) return std::nullopt;
  return QuadricCoeffs::from_poly(p);
}

Vector PolynomialCritic::param_gradient(const State& s, const Vector& a) const {
  Vector m(monomials_.size());
  for (std::size_t i = 0; i < monomials_.size(); ++i) m(static_cast<int>(i)) = monomial_value(monomials_[i], a);
  return map_.jacobian(s).transpose() * m;
}

// ---------------------------------------------------------------- linear

LinearCritic::LinearCritic(LinearMap coeff_map, Vector theta) : map_(std::move(coeff_map)) {
  if (theta.size() != map_.n_params()) throw ConfigError("LinearCritic: parameter count mismatch");
  theta_ = std::move(theta);
}

LinearCritic LinearCritic::constant(const Vector& a_s) { return LinearCritic(LinearMap::constant(a_s.size()), a_s); }

std::optional<QuadricCoeffs> LinearCritic::quadric(const State& s) const {
  const int d = action_dim();
  return QuadricCoeffs{Matrix::Zero(d, d), coeffs(s), 0.0};
}

std::optional<PolyCoeffs> LinearCritic::polynomial(const State& s) const {
  const int d = action_dim();
  const Vector c = coeffs(s);
  PolyCoeffs p(d);
  for (int i = 0; i < d; ++i) p = p + PolyCoeffs::variable(d, i) * c(i);
  return p;
}

Vector LinearCritic::param_gradient(const State& s, const Vector& a) const { return map_.jacobian(s).transpose() * a; }

// ---------------------------------------------------------------- shifted

ShiftedCritic::ShiftedCritic(const Critic& base, const Policy& policy, double alpha)
    : base_(base.clone()), policy_(policy.clone()), alpha_(alpha) {
  if (base.action_dim() != policy.action_dim()) throw ConfigError("entropy_shift: action dimension mismatch");
}

ShiftedCritic::ShiftedCritic(const ShiftedCritic& o)
    : Critic(o), base_(o.base_->clone()), policy_(o.policy_->clone()), alpha_(o.alpha_) {}

double ShiftedCritic::value(const State& s, const Vector& a) const {
  if (alpha_ == 0.0) return base_->value(s, a);
  return base_->value(s, a) - alpha_ * policy_->log_prob(s, a);
}

std::optional<QuadricCoeffs> ShiftedCritic::quadric(const State& s) const {
  auto q = base_->quadric(s);
  if (!q) return std::nullopt;
  if (alpha_ == 0.0) return q;
  const auto* gauss = dynamic_cast<const GaussianPolicy*>(policy_.get());
  if (gauss == nullptr) return std::nullopt;
  // -alpha log pi = alpha [ (a-mu)^T P (a-mu)/2 + log|det L| + d log(2 pi)/2 ]
  const int d = q->B.size();
  const Vector mu = gauss->mu(s);
  const Matrix l = gauss->cov_factor(s);
  check_cov_factor(l);
  const Matrix prec = (l * l.transpose()).inverse();
  const Vector prec_mu = prec * mu;
  q->A += 0.5 * alpha_ * prec;
  q->A = 0.5 * (q->A + q->A.transpose());
  q->B -= alpha_ * prec_mu;
  q->c += alpha_ * (0.5 * mu.dot(prec_mu) + std::log(std::abs(l.determinant())) +
                    0.5 * d * std::log(2.0 * std::numbers::pi));
  return q;
}

std::optional<PolyCoeffs> ShiftedCritic::polynomial(const State& s) const {
  if (alpha_ == 0.0) return base_->polynomial(s);
  auto q = quadric(s);
  if (!q) return std::nullopt;
  return q->to_poly();
}

ShiftedCritic entropy_shift(const Critic& critic, const Policy& policy, double alpha) {
  return ShiftedCritic(critic, policy, alpha);
}

// ---------------------------------------------------------------- value function

ValueFunction::ValueFunction(LinearMap v_map, Vector theta) : map_(std::move(v_map)), theta_(std::move(theta)) {
  if (map_.out_dim() != 1) throw ConfigError("ValueFunction: map must be scalar");
  if (theta_.size() != map_.n_params()) throw ConfigError("ValueFunction: parameter count mismatch");
}

void ValueFunction::set_params(const Vector& theta) {
  if (theta.size() != theta_.size()) throw ConfigError("ValueFunction: parameter count mismatch");
  theta_ = theta;
}

}  // namespace epg
