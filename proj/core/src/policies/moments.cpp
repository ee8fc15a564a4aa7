#include "epg/policies/moments.hpp"

#include <cmath>
#include <functional>

namespace epg {

MomentVector::MomentVector(int dim, int degree_bound) : dim_(dim), degree_bound_(degree_bound) {
  if (degree_bound < 0) throw ConfigError("MomentVector: degree_bound must be >= 0");
}

double MomentVector::at(const MultiIndex& p) const {
  if (total_degree(p) > degree_bound_) {
    throw ConfigError("MomentVector: moment of degree " + std::to_string(total_degree(p)) +
                      " requested but only degree <= " + std::to_string(degree_bound_) + " available");
  }
  auto it = values_.find(p);
  if (it == values_.end()) throw InternalError("MomentVector: missing moment");
  return it->second;
}

void MomentVector::set(const MultiIndex& p, double value) {
  if (static_cast<int>(p.size()) != dim_) throw ConfigError("MomentVector: multi-index dimension mismatch");
  values_[p] = value;
}

double MomentVector::expect(const PolyCoeffs& q) const {
  if (q.dim() != dim_) throw ConfigError("MomentVector: polynomial dimension mismatch");
  double v = 0.0;
  for (const auto& [p, c] : q.terms()) {
    if (c != 0.0) v += c * at(p);
  }
  return v;
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

MomentVector gaussian_moments_1d(double mu, double var, int degree) {
  MomentVector m(1, degree);
  std::vector<double> e(degree + 1);
  e[0] = 1.0;
  if (degree >= 1) e[1] = mu;
  for (int n = 2; n <= degree; ++n) e[n] = mu * e[n - 1] + (n - 1) * var * e[n - 2];
  for (int n = 0; n <= degree; ++n) m.set({n}, e[n]);
  return m;
}

}  // namespace

MomentVector gaussian_moments(const Vector& mu, const Matrix& cov, int degree) {
  const int d = static_cast<int>(mu.size());
  if (cov.rows() != d || cov.cols() != d) throw ConfigError("gaussian_moments: covariance shape mismatch");
  if (d == 1) return gaussian_moments_1d(mu(0), cov(0, 0), degree);
  if (degree > kMaxMultivariateMomentDegree) {
    throw ConfigError("gaussian_moments: multivariate moments supported up to degree " +
                      std::to_string(kMaxMultivariateMomentDegree) + ", degree " + std::to_string(degree) +
                      " requested");
  }

  // Central moments by Isserlis: E[z^p] = sum_j S_ij (p - e_i)_j E[z^(p - e_i - e_j)]
  // with i the first coordinate where p is non-zero.
  std::map<MultiIndex, double, GradedLex> central;
  std::function<double(const MultiIndex&)> central_at = [&](const MultiIndex& p) -> double {
    auto it = central.find(p);
    if (it != central.end()) return it->second;
    const int deg = total_degree(p);
    double v = 0.0;
    if (deg == 0) {
      v = 1.0;
    } else if (deg % 2 == 0) {
      int i = 0;
      while (p[i] == 0) ++i;
      MultiIndex q = p;
      q[i] -= 1;
      for (int j = 0; j < d; ++j) {
        if (q[j] == 0) continue;
        MultiIndex r = q;
        r[j] -= 1;
        v += cov(i, j) * q[j] * central_at(r);
      }
    }
    central.emplace(p, v);
    return v;
  };

  MomentVector m(d, degree);
  for (const auto& p : monomials_up_to(d, degree)) {
    // E[(mu + z)^p] = sum_{q <= p} prod_j C(p_j, q_j) mu_j^(p_j - q_j) E[z^q]
    double v = 0.0;
    MultiIndex q(d, 0);
    std::function<void(int, double)> expand = [&](int j, double coeff) {
      if (j == d) {
        v += coeff * central_at(q);
        return;
      }
      for (int k = 0; k <= p[j]; ++k) {
        q[j] = k;
        expand(j + 1, coeff * binomial(p[j], k) * std::pow(mu(j), p[j] - k));
      }
      q[j] = 0;
    };
    expand(0, 1.0);
    m.set(p, v);
  }
  return m;
}

}  // namespace epg
