#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "epg/linear_map.hpp"
#include "epg/policies/gaussian.hpp"
#include "epg/polynomial.hpp"

namespace epg {

// Q(a) = a^T A a + a^T B + c with A symmetric.
struct QuadricCoeffs {
  Matrix A;
  Vector B;
  double c = 0.0;

  double eval(const Vector& a) const { return a.dot(A * a) + a.dot(B) + c; }
  Vector gradient(const Vector& a) const { return 2.0 * A * a + B; }
  Matrix hessian() const { return 2.0 * A; }
  PolyCoeffs to_poly() const;
  // Throws ConfigError if p has degree > 2.
  static QuadricCoeffs from_poly(const PolyCoeffs& p);
};

// Continuous-action critic Q(a, s).
class Critic {
 public:
  virtual ~Critic() = default;

  virtual std::string class_name() const = 0;
  virtual int action_dim() const = 0;
  virtual double value(const State& s, const Vector& a) const = 0;
  // Central differences unless the representation knows better.
  virtual Vector action_gradient(const State& s, const Vector& a) const;

  // Exact structural views, when the representation has them at state s.
  virtual std::optional<QuadricCoeffs> quadric(const State&) const { return std::nullopt; }
  virtual std::optional<PolyCoeffs> polynomial(const State&) const { return std::nullopt; }
  // A_s for critics of the form Q(a) = A_s^T a.
  virtual std::optional<Vector> linear(const State&) const { return std::nullopt; }

  virtual std::unique_ptr<Critic> clone() const = 0;
};

// A critic that is linear in its parameters, learnable by semi-gradient TD.
class ParametricCritic : public Critic {
 public:
  const Vector& params() const { return theta_; }
  virtual void set_params(const Vector& theta);
  int n_params() const { return static_cast<int>(theta_.size()); }
  // dQ(a, s)/dtheta
  virtual Vector param_gradient(const State& s, const Vector& a) const = 0;

 protected:
  Vector theta_;
};

// Coefficients A(s), B(s), c(s) each produced by a LinearMap; parameters are
// laid out as [A | B | c]. A(s) is the symmetric part of reshape(A_map(s)).
class QuadricCritic : public ParametricCritic {
 public:
  QuadricCritic(LinearMap a_map, LinearMap b_map, LinearMap c_map, Vector theta);

  static QuadricCritic constant(const Matrix& A, const Vector& B, double c);

  const LinearMap& a_map() const { return a_map_; }
  const LinearMap& b_map() const { return b_map_; }
  const LinearMap& c_map() const { return c_map_; }

  QuadricCoeffs coeffs(const State& s) const;

  std::string class_name() const override { return "quadric"; }
  int action_dim() const override { return dim_; }
  double value(const State& s, const Vector& a) const override { return coeffs(s).eval(a); }
  Vector action_gradient(const State& s, const Vector& a) const override { return coeffs(s).gradient(a); }
  std::optional<QuadricCoeffs> quadric(const State& s) const override { return coeffs(s); }
  std::optional<PolyCoeffs> polynomial(const State& s) const override { return coeffs(s).to_poly(); }
  Vector param_gradient(const State& s, const Vector& a) const override;
  std::unique_ptr<Critic> clone() const override { return std::make_unique<QuadricCritic>(*this); }

 private:
  LinearMap a_map_;
  LinearMap b_map_;
  LinearMap c_map_;
  int dim_;
};

// Polynomial in a with coefficients coeff_map(s), one per monomial of
// monomials_up_to(dim, degree_bound) in graded-lex order.
class PolynomialCritic : public ParametricCritic {
 public:
  PolynomialCritic(int dim, int degree_bound, LinearMap coeff_map, Vector theta);

  static PolynomialCritic constant(const PolyCoeffs& p, int degree_bound);

  int degree_bound() const { return degree_; }
  const std::vector<MultiIndex>& monomials() const { return monomials_; }
  const LinearMap& coeff_map() const { return map_; }
  PolyCoeffs coeffs(const State& s) const;

  std::string class_name() const override { return "polynomial"; }
  int action_dim() const override { return dim_; }
  double value(const State& s, const Vector& a) const override { return coeffs(s).eval(a); }
  Vector action_gradient(const State& s, const Vector& a) const override { return coeffs(s).gradient(a); }
  std::optional<QuadricCoeffs> quadric(const State& s) const override;
  std::optional<PolyCoeffs> polynomial(const State& s) const override { return coeffs(s); }
  Vector param_gradient(const State& s, const Vector& a) const override;
  std::unique_ptr<Critic> clone() const override { return std::make_unique<PolynomialCritic>(*this); }

 private:
  int dim_;
  int degree_;
  std::vector<MultiIndex> monomials_;
  LinearMap map_;
};

// Q(a, s) = A_s^T a.
class LinearCritic : public ParametricCritic {
 public:
  LinearCritic(LinearMap coeff_map, Vector theta);

  static LinearCritic constant(const Vector& a_s);

  const LinearMap& coeff_map() const { return map_; }
  Vector coeffs(const State& s) const { return map_.eval(theta_, s); }

  std::string class_name() const override { return "linear"; }
  int action_dim() const override { return map_.out_dim(); }
  double value(const State& s, const Vector& a) const override { return coeffs(s).dot(a); }
  Vector action_gradient(const State& s, const Vector&) const override { return coeffs(s); }
  std::optional<QuadricCoeffs> quadric(const State& s) const override;
  std::optional<PolyCoeffs> polynomial(const State& s) const override;
  std::optional<Vector> linear(const State& s) const override { return coeffs(s); }
  Vector param_gradient(const State& s, const Vector& a) const override;
  std::unique_ptr<Critic> clone() const override { return std::make_unique<LinearCritic>(*this); }

 private:
  LinearMap map_;
};

// Wraps an arbitrary callable; used for non-polynomial test critics.
class FunctionCritic : public Critic {
 public:
  using Fn = std::function<double(const State&, const Vector&)>;
  FunctionCritic(int dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}

  std::string class_name() const override { return "function"; }
  int action_dim() const override { return dim_; }
  double value(const State& s, const Vector& a) const override { return fn_(s, a); }
  std::unique_ptr<Critic> clone() const override { return std::make_unique<FunctionCritic>(*this); }

 private:
  int dim_;
  Fn fn_;
};

// Q'(a, s) = Q(a, s) - alpha log pi(a|s). Stays quadric when the base critic
// is quadric and the policy Gaussian.
class ShiftedCritic : public Critic {
 public:
  ShiftedCritic(const Critic& base, const Policy& policy, double alpha);
  ShiftedCritic(const ShiftedCritic& o);

  double alpha() const { return alpha_; }

  std::string class_name() const override { return "shifted"; }
  int action_dim() const override { return base_->action_dim(); }
  double value(const State& s, const Vector& a) const override;
  std::optional<QuadricCoeffs> quadric(const State& s) const override;
  std::optional<PolyCoeffs> polynomial(const State& s) const override;
  std::unique_ptr<Critic> clone() const override { return std::make_unique<ShiftedCritic>(*this); }

 private:
  std::unique_ptr<Critic> base_;
  std::unique_ptr<Policy> policy_;
  double alpha_;
};

ShiftedCritic entropy_shift(const Critic& critic, const Policy& policy, double alpha);

// V(s) = v_map(theta, s).
class ValueFunction {
 public:
  ValueFunction(LinearMap v_map, Vector theta);

  const LinearMap& v_map() const { return map_; }
  const Vector& params() const { return theta_; }
  void set_params(const Vector& theta);
  double value(const State& s) const { return map_.eval(theta_, s)(0); }
  Vector param_gradient(const State& s) const { return map_.jacobian(s).row(0).transpose(); }

 private:
  LinearMap map_;
  Vector theta_;
};

}  // namespace epg
