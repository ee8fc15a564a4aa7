#include "epg/polynomial.hpp"

#include <cmath>
#include <numeric>

namespace epg {

int total_degree(const MultiIndex& p) { return std::accumulate(p.begin(), p.end(), 0); }

bool GradedLex::operator()(const MultiIndex& a, const MultiIndex& b) const {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  // within a degree, x1^2 precedes x1 x2 precedes x2^2
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return a.size() < b.size();
}

namespace {

void fill_degree(int dim, int remaining, int pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos == dim - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[pos] = k;
    fill_degree(dim, remaining - k, pos + 1, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> monomials_up_to(int dim, int degree) {
  std::vector<MultiIndex> out;
  MultiIndex cur(dim, 0);
  for (int d = 0; d <= degree; ++d) fill_degree(dim, d, 0, cur, out);
  return out;
}

double monomial_value(const MultiIndex& p, const Vector& a) {
  double v = 1.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    for (int k = 0; k < p[j]; ++k) v *= a(static_cast<int>(j));
  }
  return v;
}

PolyCoeffs PolyCoeffs::constant(int dim, double c) {
  PolyCoeffs p(dim);
  p.add_term(MultiIndex(dim, 0), c);
  return p;
}

PolyCoeffs PolyCoeffs::variable(int dim, int j) {
  MultiIndex e(dim, 0);
  e[j] = 1;
  return monomial(e, 1.0);
}

PolyCoeffs PolyCoeffs::monomial(const MultiIndex& p, double coeff) {
  PolyCoeffs q(static_cast<int>(p.size()));
  q.add_term(p, coeff);
  return q;
}

int PolyCoeffs::degree() const {
  int d = 0;
  for (const auto& [p, c] : terms_) {
    if (c != 0.0) d = std::max(d, total_degree(p));
  }
  return d;
}

double PolyCoeffs::coeff(const MultiIndex& p) const {
  auto it = terms_.find(p);
  return it == terms_.end() ? 0.0 : it->second;
}

void PolyCoeffs::add_term(const MultiIndex& p, double c) {
  if (static_cast<int>(p.size()) != dim_) throw ConfigError("PolyCoeffs: multi-index dimension mismatch");
  terms_[p] += c;
}

double PolyCoeffs::eval(const Vector& a) const {
  double v = 0.0;
  for (const auto& [p, c] : terms_) v += c * monomial_value(p, a);
  return v;
}

Vector PolyCoeffs::gradient(const Vector& a) const {
  Vector g = Vector::Zero(dim_);
  for (const auto& [p, c] : terms_) {
    for (int j = 0; j < dim_; ++j) {
      if (p[j] == 0) continue;
      MultiIndex q = p;
      q[j] -= 1;
      g(j) += c * p[j] * monomial_value(q, a);
    }
  }
  return g;
}

Matrix PolyCoeffs::hessian(const Vector& a) const {
  Matrix h = Matrix::Zero(dim_, dim_);
  for (const auto& [p, c] : terms_) {
    for (int i = 0; i < dim_; ++i) {
      if (p[i] == 0) continue;
      MultiIndex q = p;
      q[i] -= 1;
      for (int j = 0; j < dim_; ++j) {
        if (q[j] == 0) continue;
        MultiIndex r = q;
        r[j] -= 1;
        h(i, j) += c * p[i] * q[j] * monomial_value(r, a);
      }
    }
  }
  return h;
}

PolyCoeffs PolyCoeffs::operator+(const PolyCoeffs& o) const {
  if (o.dim_ != dim_) throw ConfigError("PolyCoeffs: dimension mismatch");
  PolyCoeffs r = *this;
  for (const auto& [p, c] : o.terms_) r.terms_[p] += c;
  return r;
}

PolyCoeffs PolyCoeffs::operator-(const PolyCoeffs& o) const { return *this + o * -1.0; }

PolyCoeffs PolyCoeffs::operator*(double k) const {
  PolyCoeffs r = *this;
  for (auto& [p, c] : r.terms_) c *= k;
  return r;
}

PolyCoeffs poly_mul(const PolyCoeffs& p, const PolyCoeffs& q) {
  if (p.dim() != q.dim()) throw ConfigError("poly_mul: dimension mismatch");
  PolyCoeffs r(p.dim());
  for (const auto& [a, ca] : p.terms()) {
    for (const auto& [b, cb] : q.terms()) {
      MultiIndex s(a.size());
      for (std::size_t j = 0; j < a.size(); ++j) s[j] = a[j] + b[j];
      r.add_term(s, ca * cb);
    }
  }
  return r;
}

}  // namespace epg
