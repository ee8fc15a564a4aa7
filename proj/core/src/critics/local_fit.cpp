#include "epg/critics/local_fit.hpp"

#include <cmath>

namespace epg {

int quadric_coeff_count(int d) { return d * (d + 1) / 2 + d + 1; }

LocalQuadricFit fit_local_quadric(const Critic& critic, const State& s, const Vector& center, const FitConfig& cfg) {
  return fit_local_quadric(critic, s, center, cfg.n_samples, cfg.radius, cfg.seed);
}

LocalQuadricFit fit_local_quadric(const Critic& critic, const State& s, const Vector& center, int n_samples,
                                  double radius, std::uint64_t seed) {
  const int d = static_cast<int>(center.size());
  const int k = quadric_coeff_count(d);
  if (critic.action_dim() != d) throw ConfigError("fit_local_quadric: centre dimension mismatch");
  if (n_samples < k) {
    throw ConfigError("fit_local_quadric: need at least " + std::to_string(k) + " samples, got " +
                      std::to_string(n_samples));
  }
  if (!(radius > 0.0)) throw ConfigError("fit_local_quadric: radius must be positive");

  // Regress in scaled coordinates u = (a - center)/radius for conditioning.
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix design(n_samples, k);
  Vector y(n_samples);
  for (int n = 0; n < n_samples; ++n) {
    Vector u = standard_normal(d, rng);
    u *= std::pow(unif(rng), 1.0 / d) / u.norm();
    int col = 0;
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) design(n, col++) = u(i) * u(j);
    }
    for (int i = 0; i < d; ++i) design(n, col++) = u(i);
    design(n, col) = 1.0;
    y(n) = critic.value(s, center + radius * u);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  if (qr.rank() < k) {
    throw ConfigError("fit_local_quadric: rank-deficient design; increase n_samples or radius");
  }
  const Vector w = qr.solve(y);
  const double residual_rms = std::sqrt((design * w - y).squaredNorm() / n_samples);

  // Q = u^T Au u + bu^T u + c0 with u = (a - m)/r, expanded in a.
  Matrix au = Matrix::Zero(d, d);
  int col = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      if (i == j) {
        au(i, i) = w(col);
      } else {
        au(i, j) = 0.5 * w(col);
        au(j, i) = 0.5 * w(col);
      }
      ++col;
    }
  }
  const Vector bu = w.segment(col, d);
  const double cu = w(col + d);
  const double r2 = radius * radius;
  LocalQuadricFit fit;
  fit.coeffs.A = au / r2;
  fit.coeffs.A = 0.5 * (fit.coeffs.A + fit.coeffs.A.transpose());
  fit.coeffs.B = bu / radius - 2.0 * fit.coeffs.A * center;
  fit.coeffs.c = center.dot(fit.coeffs.A * center) - bu.dot(center) / radius + cu;
  fit.residual_rms = residual_rms;
  return fit;
}

}  // namespace epg
