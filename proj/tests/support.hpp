#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "epg/types.hpp"

namespace epg::test {

inline const nlohmann::json& oracle() {
  static const nlohmann::json j = [] {
    std::ifstream in(EPG_ORACLE_FILE);
    if (!in) throw std::runtime_error("missing oracle file " EPG_ORACLE_FILE);
    return nlohmann::json::parse(in);
  }();
  return j;
}

inline Vector to_vector(const nlohmann::json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

inline Matrix to_matrix(const nlohmann::json& j) {
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

inline Vector uniform_vector(Rng& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Central differences of f at theta.
inline Vector numeric_gradient(const std::function<double(const Vector&)>& f, const Vector& theta, double h = 1e-6) {
  Vector g(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Vector tp = theta, tm = theta;
    tp(i) += h;
    tm(i) -= h;
    g(i) = (f(tp) - f(tm)) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

inline Matrix random_symmetric(Rng& rng, int d, double lo, double hi) {
  Matrix q = Matrix::NullaryExpr(d, d, [&] { return uniform(rng, -1.0, 1.0); });
  q = Eigen::HouseholderQR<Matrix>(q).householderQ();
  const Vector lam = uniform_vector(rng, d, lo, hi);
  Matrix h = q * lam.asDiagonal() * q.transpose();
  return 0.5 * (h + h.transpose());
}

}  // namespace epg::test
