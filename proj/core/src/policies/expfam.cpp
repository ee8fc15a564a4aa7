#include "epg/policies/expfam.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "epg/quadrature/rules.hpp"

namespace epg {

int ExpFamilyPolicy::stats_degree() const {
  int d = 0;
  for (const auto& t : sufficient_stats()) d = std::max(d, t.degree());
  return d;
}

Vector ExpFamilyPolicy::eval_stats(const Vector& a) const {
  const auto& stats = sufficient_stats();
  Vector t(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) t(static_cast<int>(i)) = stats[i].eval(a);
  return t;
}

double ExpFamilyPolicy::log_prob(const State& s, const Vector& a) const {
  if (a.size() != action_dim()) throw ConfigError(class_name() + ": action dimension mismatch");
  if (!in_support(a)) throw DomainError(class_name() + ": action outside the support");
  return natural_params(s).dot(eval_stats(a)) - log_partition(s) + carrier(a);
}

GradientEstimate ExpFamilyPolicy::grad_log_prob(const State& s, const Vector& a) const {
  if (a.size() != action_dim()) throw ConfigError(class_name() + ": action dimension mismatch");
  if (!in_support(a)) throw DomainError(class_name() + ": action outside the support");
  Vector g = natural_params_jacobian(s).transpose() * eval_stats(a) - log_partition_gradient(s);
  return GradientEstimate(layout(), g, "score");
}

// ---------------------------------------------------------------- Gaussian

GaussianExpFamily::GaussianExpFamily(GaussianPolicy base) : base_(std::move(base)) {
  const int d = base_.action_dim();
  theta_ = base_.params();
  for (int i = 0; i < d; ++i) stats_.push_back(PolyCoeffs::variable(d, i));
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) stats_.push_back(poly_mul(PolyCoeffs::variable(d, i), PolyCoeffs::variable(d, j)));
  }
}

void GaussianExpFamily::set_params(const Vector& theta) {
  base_.set_params(theta);
  theta_ = theta;
}

Vector GaussianExpFamily::natural_params(const State& s) const {
  const int d = action_dim();
  const Matrix prec = base_.covariance(s).inverse();
  Vector eta(d + d * d);
  eta.head(d) = prec * base_.mu(s);
  eta.tail(d * d) = -0.5 * Eigen::Map<const Vector>(prec.data(), d * d);
  return eta;
}

Matrix GaussianExpFamily::natural_params_jacobian(const State& s) const {
  const int d = action_dim();
  const Vector mu = base_.mu(s);
  const Matrix l = base_.cov_factor(s);
  check_cov_factor(l);
  const Matrix prec = (l * l.transpose()).inverse();
  const Matrix j_mu = base_.mu_jacobian(s);
  const Matrix j_l = base_.cov_factor_jacobian(s);
  Matrix out(d + d * d, n_params());
  for (int k = 0; k < n_params(); ++k) {
    const Vector dmu = j_mu.col(k);
    const Matrix dl = Eigen::Map<const Matrix>(j_l.col(k).data(), d, d);
    const Matrix dcov = dl * l.transpose() + l * dl.transpose();
    const Matrix dprec = -prec * dcov * prec;
    out.col(k).head(d) = dprec * mu + prec * dmu;
    out.col(k).tail(d * d) = -0.5 * Eigen::Map<const Vector>(dprec.data(), d * d);
  }
  return out;
}

double GaussianExpFamily::log_partition(const State& s) const {
  const int d = action_dim();
  const Vector mu = base_.mu(s);
  const Matrix cov = base_.covariance(s);
  Eigen::LDLT<Matrix> ldlt(cov);
  const double logdet = ldlt.vectorD().array().log().sum();
  return 0.5 * mu.dot(ldlt.solve(mu)) + 0.5 * logdet + 0.5 * d * std::log(2.0 * std::numbers::pi);
}

Vector GaussianExpFamily::log_partition_gradient(const State& s) const {
  const int d = action_dim();
  const Vector mu = base_.mu(s);
  const Matrix l = base_.cov_factor(s);
  check_cov_factor(l);
  const Matrix prec = (l * l.transpose()).inverse();
  const Vector prec_mu = prec * mu;
  const Matrix j_mu = base_.mu_jacobian(s);
  const Matrix j_l = base_.cov_factor_jacobian(s);
  Vector g(n_params());
  for (int k = 0; k < n_params(); ++k) {
    const Matrix dl = Eigen::Map<const Matrix>(j_l.col(k).data(), d, d);
    const Matrix dcov = dl * l.transpose() + l * dl.transpose();
    g(k) = prec_mu.dot(j_mu.col(k)) - 0.5 * prec_mu.dot(dcov * prec_mu) + 0.5 * (prec * dcov).trace();
  }
  return g;
}

MomentVector GaussianExpFamily::moments(const State& s, int degree_bound) const {
  return gaussian_moments(base_.mu(s), base_.covariance(s), degree_bound);
}

// ---------------------------------------------------------------- Gamma

GammaPolicy::GammaPolicy(double shape, LinearMap log_rate_map, Vector theta)
    : shape_(shape), map_(std::move(log_rate_map)) {
  if (!(shape_ > 0.0)) throw ConfigError("GammaPolicy: shape must be positive");
  if (map_.out_dim() != 1) throw ConfigError("GammaPolicy: log-rate map must be scalar");
  if (theta.size() != map_.n_params()) throw ConfigError("GammaPolicy: parameter count mismatch");
  theta_ = std::move(theta);
  stats_.push_back(PolyCoeffs::variable(1, 0));
}

double GammaPolicy::rate(const State& s) const { return std::exp(map_.eval(theta_, s)(0)); }

Vector GammaPolicy::natural_params(const State& s) const { return Vector::Constant(1, -rate(s)); }

Matrix GammaPolicy::natural_params_jacobian(const State& s) const { return -rate(s) * map_.jacobian(s); }

double GammaPolicy::log_partition(const State& s) const {
  return std::lgamma(shape_) - shape_ * map_.eval(theta_, s)(0);
}

Vector GammaPolicy::log_partition_gradient(const State& s) const {
  return -shape_ * map_.jacobian(s).row(0).transpose();
}

double GammaPolicy::carrier(const Vector& a) const { return (shape_ - 1.0) * std::log(a(0)); }

MomentVector GammaPolicy::moments(const State& s, int degree_bound) const {
  // derivatives of the MGF (1 - t/rate)^-shape at t = 0
  const double lambda = rate(s);
  MomentVector m(1, degree_bound);
  double v = 1.0;
  m.set({0}, 1.0);
  for (int n = 1; n <= degree_bound; ++n) {
    v *= (shape_ + n - 1) / lambda;
    m.set({n}, v);
  }
  return m;
}

ActionSample GammaPolicy::sample(const State& s, Rng& rng) const {
  std::gamma_distribution<double> gamma(shape_, 1.0 / rate(s));
  Vector a = Vector::Constant(1, gamma(rng));
  return {a, a};
}

Vector GammaPolicy::mean(const State& s) const { return Vector::Constant(1, shape_ / rate(s)); }

Matrix GammaPolicy::mean_jacobian(const State& s) const { return -(shape_ / rate(s)) * map_.jacobian(s); }

// ---------------------------------------------------------------- polynomial exponential

namespace {

constexpr int kPanelOrder = 32;
constexpr int kPanels = 48;
constexpr double kLogMassCut = 60.0;
constexpr double kMomentRelTol = 1e-9;

}  // namespace

PolyExpPolicy::PolyExpPolicy(int degree, LinearMap eta_map, Vector theta) : degree_(degree), map_(std::move(eta_map)) {
  if (degree_ < 2 || degree_ % 2 != 0) throw ConfigError("PolyExpPolicy: degree must be even and >= 2");
  if (map_.out_dim() != degree_) throw ConfigError("PolyExpPolicy: eta map must output `degree` entries");
  if (theta.size() != map_.n_params()) throw ConfigError("PolyExpPolicy: parameter count mismatch");
  theta_ = std::move(theta);
  for (int j = 1; j <= degree_; ++j) stats_.push_back(PolyCoeffs::monomial({j}, 1.0));
}

Vector PolyExpPolicy::natural_params(const State& s) const {
  Vector eta = map_.eval(theta_, s);
  if (!(eta(degree_ - 1) < 0.0)) {
    throw DomainError("PolyExpPolicy: leading natural parameter must be negative for a normalisable density");
  }
  return eta;
}

Matrix PolyExpPolicy::natural_params_jacobian(const State& s) const { return map_.jacobian(s); }

double PolyExpPolicy::log_density_unnormalised(const Vector& eta, double a) const {
  double v = 0.0;
  for (int j = degree_; j >= 1; --j) v = (v + eta(j - 1)) * a;
  return v;
}

PolyExpPolicy::Window PolyExpPolicy::window(const Vector& eta) const {
  // Outside the Cauchy bound of the roots of p'(a) the log-density is
  // monotone, so the peak lies inside [-r, r].
  const double lead = std::abs(degree_ * eta(degree_ - 1));
  double r = 0.0;
  for (int j = 1; j < degree_; ++j) r = std::max(r, std::abs(j * eta(j - 1)) / lead);
  r += 1.0;
  double peak = -std::numeric_limits<double>::infinity();
  const int grid = 4001;
  for (int i = 0; i < grid; ++i) {
    const double a = -r + 2.0 * r * i / (grid - 1);
    peak = std::max(peak, log_density_unnormalised(eta, a));
  }
  double lo = -r;
  while (log_density_unnormalised(eta, lo) > peak - kLogMassCut) lo -= r;
  double hi = r;
  while (log_density_unnormalised(eta, hi) > peak - kLogMassCut) hi += r;
  return {lo, hi, peak};
}

MomentVector PolyExpPolicy::moments(const State& s, int degree_bound) const {
  const Vector eta = natural_params(s);
  const Window w = window(eta);
  auto integrate = [&](int panels) {
    const QuadratureRule rule = composite_gauss_legendre(kPanelOrder, panels, w.lo, w.hi);
    Vector sums = Vector::Zero(degree_bound + 1);
    for (int i = 0; i < rule.nodes.size(); ++i) {
      const double a = rule.nodes(i);
      double term = rule.weights(i) * std::exp(log_density_unnormalised(eta, a) - w.log_peak);
      for (int n = 0; n <= degree_bound; ++n) {
        sums(n) += term;
        term *= a;
      }
    }
    return sums;
  };
  const Vector fine = integrate(kPanels);
  const Vector coarse = integrate(kPanels / 2);
  MomentVector m(1, degree_bound);
  double worst = 0.0;
  for (int n = 0; n <= degree_bound; ++n) {
    const double v = fine(n) / fine(0);
    const double err = std::abs(v - coarse(n) / coarse(0));
    worst = std::max(worst, err / std::max(1.0, std::abs(v)));
    m.set({n}, v);
  }
  m.error_estimate = worst;
  if (worst > kMomentRelTol || degree_bound > kMomentDegreeBudget) {
    m.warning = "numeric moment fallback: degree " + std::to_string(degree_bound) +
                " exceeds the accuracy budget (estimated relative error " + std::to_string(worst) + ")";
  }
  return m;
}

double PolyExpPolicy::log_partition(const State& s) const {
  const Vector eta = natural_params(s);
  const Window w = window(eta);
  const QuadratureRule rule = composite_gauss_legendre(kPanelOrder, kPanels, w.lo, w.hi);
  double z = 0.0;
  for (int i = 0; i < rule.nodes.size(); ++i) {
    z += rule.weights(i) * std::exp(log_density_unnormalised(eta, rule.nodes(i)) - w.log_peak);
  }
  return w.log_peak + std::log(z);
}

Vector PolyExpPolicy::log_partition_gradient(const State& s) const {
  // dU/deta_j = E[a^j]
  const MomentVector m = moments(s, degree_);
  Vector et(degree_);
  for (int j = 1; j <= degree_; ++j) et(j - 1) = m.at({j});
  return natural_params_jacobian(s).transpose() * et;
}

ActionSample PolyExpPolicy::sample(const State& s, Rng& rng) const {
  // inverse CDF on a fine trapezoid grid
  const Vector eta = natural_params(s);
  const Window w = window(eta);
  const int n = 20001;
  std::vector<double> xs(n);
  std::vector<double> cdf(n, 0.0);
  double prev = 0.0;
  for (int i = 0; i < n; ++i) {
    xs[i] = w.lo + (w.hi - w.lo) * i / (n - 1);
    const double dens = std::exp(log_density_unnormalised(eta, xs[i]) - w.log_peak);
    if (i > 0) cdf[i] = cdf[i - 1] + 0.5 * (dens + prev) * (xs[i] - xs[i - 1]);
    prev = dens;
  }
  std::uniform_real_distribution<double> unif(0.0, cdf.back());
  const double u = unif(rng);
  auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), 1, n - 1);
  const double span = cdf[k] - cdf[k - 1];
  const double t = span > 0.0 ? (u - cdf[k - 1]) / span : 0.5;
  Vector a = Vector::Constant(1, xs[k - 1] + t * (xs[k] - xs[k - 1]));
  return {a, a};
}

Vector PolyExpPolicy::mean(const State& s) const { return Vector::Constant(1, moments(s, 1).at({1})); }

Matrix PolyExpPolicy::mean_jacobian(const State& s) const {
  // dE[a]/deta_j = Cov(a, a^j)
  const MomentVector m = moments(s, degree_ + 1);
  Vector d(degree_);
  for (int j = 1; j <= degree_; ++j) d(j - 1) = m.at({j + 1}) - m.at({1}) * m.at({j});
  return d.transpose() * natural_params_jacobian(s);
}

MomentVector expfam_moments(const ExpFamilyPolicy& policy, const State& s, int degree_bound) {
  return policy.moments(s, degree_bound);
}

MomentVector expfam_moments(const GaussianPolicy& policy, const State& s, int degree_bound) {
  return gaussian_moments(policy.mu(s), policy.covariance(s), degree_bound);
}

}  // namespace epg
