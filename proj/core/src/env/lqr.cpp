#include "epg/env/lqr.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace epg {

namespace {

bool symmetric(const Matrix& m) { return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10; }

Matrix riccati_map(const LQREnv& env, const Matrix& p) {
  const double g = env.gamma;
  const Matrix curvature = env.Rc + g * env.G.transpose() * p * env.G;
  const Matrix cross = g * env.G.transpose() * p * env.F;
  Matrix next = env.Qc + g * env.F.transpose() * p * env.F - cross.transpose() * curvature.ldlt().solve(cross);
  return 0.5 * (next + next.transpose());
}

}  // namespace

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

void LQREnv::validate() const {
  const int ds = dim_s();
  const int da = dim_a();
  if (ds < 1 || da < 1) throw ConfigError("LQREnv: dimensions must be positive");
  if (F.cols() != ds || G.rows() != ds) throw ConfigError("LQREnv: F and G shapes are inconsistent");
  if (Qc.rows() != ds || Qc.cols() != ds || !symmetric(Qc)) throw ConfigError("LQREnv: Qc must be symmetric d_s x d_s");
  if (Rc.rows() != da || Rc.cols() != da || !symmetric(Rc)) throw ConfigError("LQREnv: Rc must be symmetric d_a x d_a");
  if (noise_cov.rows() != ds || noise_cov.cols() != ds || !symmetric(noise_cov)) {
    throw ConfigError("LQREnv: noise_cov must be symmetric d_s x d_s");
  }
  if (Eigen::SelfAdjointEigenSolver<Matrix>(Qc).eigenvalues().maxCoeff() > 1e-12) {
    throw ConfigError("LQREnv: Qc must be negative semi-definite");
  }
  if (!(Eigen::SelfAdjointEigenSolver<Matrix>(Rc).eigenvalues().maxCoeff() < 0.0)) {
    throw ConfigError("LQREnv: Rc must be negative definite");
  }
  if (Eigen::SelfAdjointEigenSolver<Matrix>(noise_cov).eigenvalues().minCoeff() < -1e-12) {
    throw ConfigError("LQREnv: noise_cov must be positive semi-definite");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("LQREnv: gamma must lie in [0, 1)");
  if (horizon < 1) throw ConfigError("LQREnv: horizon must be positive");
  if (initial_mean.size() != ds) throw ConfigError("LQREnv: initial_mean size mismatch");
  if (initial_cov.rows() != ds || initial_cov.cols() != ds) throw ConfigError("LQREnv: initial_cov shape mismatch");
}

Vector LQREnv::reset(Rng& rng) const { return initial_mean + psd_sqrt(initial_cov) * standard_normal(dim_s(), rng); }

Vector LQREnv::step(const Vector& s, const Vector& a, Rng& rng) const {
  if (a.size() != dim_a()) throw ConfigError("LQREnv: action dimension mismatch");
  return F * s + G * a + psd_sqrt(noise_cov) * standard_normal(dim_s(), rng);
}

RiccatiSolution lqr_riccati(const LQREnv& env) {
  env.validate();
  const int ds = env.dim_s();
  RiccatiSolution sol;
  Matrix p = Matrix::Zero(ds, ds);
  const int max_iter = 1000000;
  for (int it = 1; it <= max_iter; ++it) {
    const Matrix next = riccati_map(env, p);
    if (!next.allFinite() || next.norm() > 1e12) {
      throw InternalError("lqr_riccati: recursion diverged after " + std::to_string(it) +
                          " iterations (system may be unstabilisable)");
    }
    const double change = (next - p).norm();
    p = next;
    if (change <= 1e-10 * std::max(p.norm(), 1e-300) || change == 0.0) {
      sol.iterations = it;
      break;
    }
    if (it == max_iter) throw InternalError("lqr_riccati: no fixed point within the iteration budget");
  }
  const double g = env.gamma;
  const Matrix curvature = env.Rc + g * env.G.transpose() * p * env.G;
  if (!(Eigen::SelfAdjointEigenSolver<Matrix>(curvature).eigenvalues().maxCoeff() < 0.0)) {
    throw InternalError("lqr_riccati: action curvature is not negative definite at the fixed point");
  }
  sol.gain = -curvature.ldlt().solve(g * env.G.transpose() * p * env.F);
  sol.value_quadric = p;
  sol.value_offset = g * (p * env.noise_cov).trace() / (1.0 - g);
  sol.optimal_return = env.initial_mean.dot(p * env.initial_mean) + (p * env.initial_cov).trace() + sol.value_offset;
  return sol;
}

double riccati_residual(const LQREnv& env, const Matrix& value_quadric) {
  return (riccati_map(env, value_quadric) - value_quadric).norm();
}

}  // namespace epg
