#pragma once

#include <map>
#include <vector>

#include "epg/types.hpp"

namespace epg {

// Exponent per action dimension.
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& p);

// Graded lexicographic order: lower total degree first, then lexicographic
// with the first coordinate most significant (descending exponents).
struct GradedLex {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

// All multi-indices in `dim` variables with total degree <= degree, in
// graded-lex order.
std::vector<MultiIndex> monomials_up_to(int dim, int degree);

double monomial_value(const MultiIndex& p, const Vector& a);

class PolyCoeffs {
 public:
  using Terms = std::map<MultiIndex, double, GradedLex>;

  explicit PolyCoeffs(int dim = 1) : dim_(dim) {}

  static PolyCoeffs constant(int dim, double c);
  static PolyCoeffs variable(int dim, int j);
  static PolyCoeffs monomial(const MultiIndex& p, double coeff);

  int dim() const { return dim_; }
  // Degree of the highest non-zero term; 0 for the zero polynomial.
  int degree() const;
  const Terms& terms() const { return terms_; }

  double coeff(const MultiIndex& p) const;
  void add_term(const MultiIndex& p, double coeff);

  double eval(const Vector& a) const;
  Vector gradient(const Vector& a) const;
  Matrix hessian(const Vector& a) const;

  PolyCoeffs operator+(const PolyCoeffs& o) const;
  PolyCoeffs operator-(const PolyCoeffs& o) const;
  PolyCoeffs operator*(double k) const;

 private:
  int dim_;
  Terms terms_;
};

PolyCoeffs poly_mul(const PolyCoeffs& p, const PolyCoeffs& q);

}  // namespace epg
