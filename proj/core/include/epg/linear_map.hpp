#pragma once

#include "epg/types.hpp"

namespace epg {

// A map (theta, state) -> R^out that is linear in theta: y = W phi(s) with
// W = reshape(theta, out_dim, n_features) in column-major order.
class LinearMap {
 public:
  enum class Kind { constant, tabular, affine, quadratic };

  LinearMap() = default;

  static LinearMap constant(int out_dim);
  static LinearMap tabular(int n_states, int out_dim);
  // phi(s) = [x; 1]
  static LinearMap affine(int in_dim, int out_dim);
  // phi(s) = [x; upper(x x^T); 1]
  static LinearMap quadratic(int in_dim, int out_dim);

  Kind kind() const { return kind_; }
  int out_dim() const { return out_dim_; }
  int in_dim() const { return in_dim_; }
  int n_features() const { return n_features_; }
  int n_params() const { return out_dim_ * n_features_; }

  Vector features(const State& s) const;
  Vector eval(const Vector& theta, const State& s) const;
  // out_dim x n_params
  Matrix jacobian(const State& s) const;

  bool operator==(const LinearMap& o) const {
    return kind_ == o.kind_ && out_dim_ == o.out_dim_ && in_dim_ == o.in_dim_ &&
           n_features_ == o.n_features_;
  }

 private:
  LinearMap(Kind kind, int in_dim, int out_dim, int n_features)
      : kind_(kind), in_dim_(in_dim), out_dim_(out_dim), n_features_(n_features) {}

  Kind kind_ = Kind::constant;
  int in_dim_ = 0;
  int out_dim_ = 0;
  int n_features_ = 1;
};

const char* to_string(LinearMap::Kind kind);
LinearMap::Kind linear_map_kind_from_string(const std::string& name);

}  // namespace epg
