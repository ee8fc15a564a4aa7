#include "epg/exploration/exploration.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace epg {

void ExplorationConfig::validate() const {
  if (!(sigma0 > 0.0)) throw ConfigError("ExplorationConfig: sigma0 must be positive");
  if (!(c > 0.0)) throw ConfigError("ExplorationConfig: c must be positive");
}

Matrix hessian_exploration_cov(const HessianEstimate& h, const ExplorationConfig& cfg) {
  cfg.validate();
  if (h.H.rows() != h.H.cols()) throw ConfigError("hessian_exploration_cov: H must be square");
  if ((h.H - h.H.transpose()).cwiseAbs().maxCoeff() > 1e-6) {
    throw ConfigError("hessian_exploration_cov: H is not symmetric (symmetrise before calling)");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h.H);
  const Vector scale = (cfg.c * eig.eigenvalues()).array().exp();
  Matrix out = cfg.sigma0 * eig.eigenvectors() * scale.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

Matrix exploration_limit_iterate(const Matrix& H, double sigma0, long n) {
  if (n < 1) throw ConfigError("exploration_limit_iterate: n must be >= 1");
  const int d = static_cast<int>(H.rows());
  Matrix base = Matrix::Identity(d, d) + H / static_cast<double>(n);
  Matrix result = Matrix::Identity(d, d);
  long k = n;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return sigma0 * result;
}

bool OUConfig::stable() const { return std::abs(psi) < 1.0; }

double OUConfig::stationary_variance() const {
  if (!stable()) return std::numeric_limits<double>::infinity();
  return sigma * sigma / (1.0 - psi * psi);
}

Vector ou_step(OUConfig& cfg, Rng& rng) {
  if (cfg.state.size() == 0) throw ConfigError("ou_step: noise state has dimension 0");
  const Vector z = standard_normal(static_cast<int>(cfg.state.size()), rng);
  cfg.state = -cfg.psi * cfg.state + cfg.sigma * z;
  return cfg.state;
}

Vector ou_step(OUConfig& cfg, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return ou_step(cfg, rng);
}

}  // namespace epg
