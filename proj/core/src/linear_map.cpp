#include "epg/linear_map.hpp"

namespace epg {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  // splitmix64 finaliser over the combined words
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vector standard_normal(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(n);
  for (int i = 0; i < n; ++i) z(i) = normal(rng);
  return z;
}

LinearMap LinearMap::constant(int out_dim) {
  if (out_dim < 1) throw ConfigError("LinearMap: out_dim must be positive");
  return LinearMap(Kind::constant, 0, out_dim, 1);
}

LinearMap LinearMap::tabular(int n_states, int out_dim) {
  if (out_dim < 1 || n_states < 1) throw ConfigError("LinearMap: dimensions must be positive");
  return LinearMap(Kind::tabular, n_states, out_dim, n_states);
}

LinearMap LinearMap::affine(int in_dim, int out_dim) {
  if (out_dim < 1 || in_dim < 1) throw ConfigError("LinearMap: dimensions must be positive");
  return LinearMap(Kind::affine, in_dim, out_dim, in_dim + 1);
}

LinearMap LinearMap::quadratic(int in_dim, int out_dim) {
  if (out_dim < 1 || in_dim < 1) throw ConfigError("LinearMap: dimensions must be positive");
  return LinearMap(Kind::quadratic, in_dim, out_dim, in_dim + in_dim * (in_dim + 1) / 2 + 1);
}

Vector LinearMap::features(const State& s) const {
  Vector phi = Vector::Zero(n_features_);
  switch (kind_) {
    case Kind::constant:
      phi(0) = 1.0;
      break;
    case Kind::tabular:
      if (s.index < 0 || s.index >= in_dim_) {
        throw ConfigError("LinearMap: state index " + std::to_string(s.index) + " out of range");
      }
      phi(s.index) = 1.0;
      break;
    case Kind::affine:
    case Kind::quadratic: {
      if (s.x.size() != in_dim_) {
        throw ConfigError("LinearMap: expected state features of size " + std::to_string(in_dim_) +
                          ", got " + std::to_string(s.x.size()));
      }
      phi.head(in_dim_) = s.x;
      int k = in_dim_;
      if (kind_ == Kind::quadratic) {
        for (int i = 0; i < in_dim_; ++i) {
          for (int j = i; j < in_dim_; ++j) phi(k++) = s.x(i) * s.x(j);
        }
      }
      phi(k) = 1.0;
      break;
    }
  }
  return phi;
}

Vector LinearMap::eval(const Vector& theta, const State& s) const {
  if (theta.size() != n_params()) {
    throw ConfigError("LinearMap: expected " + std::to_string(n_params()) + " parameters, got " +
                      std::to_string(theta.size()));
  }
  Eigen::Map<const Matrix> w(theta.data(), out_dim_, n_features_);
  return w * features(s);
}

Matrix LinearMap::jacobian(const State& s) const {
  const Vector phi = features(s);
  Matrix j = Matrix::Zero(out_dim_, n_params());
  for (int f = 0; f < n_features_; ++f) {
    if (phi(f) == 0.0) continue;
    for (int i = 0; i < out_dim_; ++i) j(i, i + f * out_dim_) = phi(f);
  }
  return j;
}

const char* to_string(LinearMap::Kind kind) {
  switch (kind) {
    case LinearMap::Kind::constant: return "constant";
    case LinearMap::Kind::tabular: return "tabular";
    case LinearMap::Kind::affine: return "affine";
    case LinearMap::Kind::quadratic: return "quadratic";
  }
  return "constant";
}

LinearMap::Kind linear_map_kind_from_string(const std::string& name) {
  if (name == "constant") return LinearMap::Kind::constant;
  if (name == "tabular") return LinearMap::Kind::tabular;
  if (name == "affine") return LinearMap::Kind::affine;
  if (name == "quadratic") return LinearMap::Kind::quadratic;
  throw ConfigError("unknown map kind '" + name + "'");
}

}  // namespace epg
