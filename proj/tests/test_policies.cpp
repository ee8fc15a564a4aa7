#include <algorithm>

#include <gtest/gtest.h>

#include "epg/policies/dirac.hpp"
#include "epg/policies/expfam.hpp"
#include "epg/policies/gaussian.hpp"
#include "epg/policies/softmax.hpp"
#include "epg/policies/squashed.hpp"
#include "epg/quadrature/rules.hpp"
#include "support.hpp"

using namespace epg;

namespace {

GaussianPolicy affine_gaussian(int d, Rng& rng) {
  const LinearMap mm = LinearMap::affine(2, d);
  const LinearMap cm = LinearMap::affine(2, d * d);
  Vector theta(mm.n_params() + cm.n_params());
  theta.head(mm.n_params()) = test::uniform_vector(rng, mm.n_params(), -1, 1);
  Matrix w(d * d, 3);
  w.leftCols(2) = Matrix::NullaryExpr(d * d, 2, [&] { return test::uniform(rng, -0.05, 0.05); });
  Matrix l = Matrix::NullaryExpr(d, d, [&] { return test::uniform(rng, -0.2, 0.2); });
  l.diagonal() = test::uniform_vector(rng, d, 0.5, 1.0);
  w.col(2) = Eigen::Map<const Vector>(l.data(), d * d);
  theta.tail(cm.n_params()) = Eigen::Map<const Vector>(w.data(), w.size());
  return GaussianPolicy(mm, cm, theta);
}

// grad_log_prob against central differences of log_prob in theta.
double score_error(const Policy& policy, const State& s, const Vector& a) {
  std::unique_ptr<Policy> p = policy.clone();
  const Vector analytic = policy.grad_log_prob(s, a).flat();
  const Vector fd = test::numeric_gradient(
      [&](const Vector& th) {
        p->set_params(th);
        return p->log_prob(s, a);
      },
      policy.params(), 1e-6);
  return (analytic - fd).norm() / std::max(1.0, fd.norm());
}

double ks_statistic_normal(std::vector<double> x, double mu, double sd) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = normal_cdf((x[i] - mu) / sd);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
  }
  return d;
}

}  // namespace

TEST(GaussianScore, ModeAndUnitOffset) {
  const GaussianPolicy p = GaussianPolicy::constant(Vector::Zero(1), Matrix::Identity(1, 1));
  const State s = State::continuous(Vector());
  EXPECT_EQ(p.grad_log_prob(s, Vector::Zero(1)).block("mean")(0), 0.0);
  EXPECT_NEAR(p.grad_log_prob(s, Vector::Ones(1)).block("mean")(0), 1.0, 1e-15);
}

TEST(SoftmaxScore, EqualLogitsTwoActions) {
  const SoftmaxPolicy p = SoftmaxPolicy::tabular(1, 2, Vector::Zero(2));
  const Vector g = p.grad_log_prob(State::tabular(0), 0).flat();
  EXPECT_NEAR(g(0), 0.5, 1e-15);
  EXPECT_NEAR(g(1), -0.5, 1e-15);
}

TEST(Score, MatchesFiniteDifferencesForEveryClass) {
  Rng rng = make_rng(123);
  for (int k = 0; k < 20; ++k) {
    const State s = State::continuous(test::uniform_vector(rng, 2, -1, 1));
    const int d = 1 + k % 3;
    const GaussianPolicy g = affine_gaussian(d, rng);
    EXPECT_LE(score_error(g, s, g.sample(s, rng).action), 1e-4) << "gaussian " << k;

    GaussianPolicy g1 = affine_gaussian(1, rng);
    const SquashedPolicy sig(g1, Squash::sigmoid);
    EXPECT_LE(score_error(sig, s, sig.sample(s, rng).action), 1e-4) << "sigmoid " << k;
    const SquashedPolicy ex(g1, Squash::exp);
    EXPECT_LE(score_error(ex, s, ex.sample(s, rng).action), 1e-4) << "exp " << k;

    const ClippedPolicy clipped(GaussianPolicy(LinearMap::affine(2, 1), LinearMap::affine(2, 1),
                                               (Vector(6) << test::uniform_vector(rng, 3, -0.5, 1.5),
                                                test::uniform(rng, -0.05, 0.05), test::uniform(rng, -0.05, 0.05),
                                                test::uniform(rng, 0.3, 0.8))
                                                   .finished()));
    const Vector a_in = Vector::Constant(1, test::uniform(rng, 0.05, 0.95));
    EXPECT_LE(score_error(clipped, s, a_in), 1e-4) << "clipped interior " << k;
    EXPECT_LE(score_error(clipped, s, Vector::Constant(1, k % 2 == 0 ? 0.0 : 1.0)), 1e-4) << "clipped atom " << k;

    const GammaPolicy gamma(test::uniform(rng, 0.5, 4.0), LinearMap::affine(2, 1), test::uniform_vector(rng, 3, -1, 1));
    EXPECT_LE(score_error(gamma, s, gamma.sample(s, rng).action), 1e-4) << "gamma " << k;

    Vector eta_theta = Vector::Zero(4 * 3);
    eta_theta.segment(0, 4) << test::uniform(rng, -0.5, 0.5), test::uniform(rng, -0.5, 0.5), test::uniform(rng, -1, -0.2),
        test::uniform(rng, -0.5, -0.2);
    eta_theta.segment(4, 4) = test::uniform_vector(rng, 4, -0.05, 0.05);
    eta_theta.segment(8, 4) = test::uniform_vector(rng, 4, -0.05, 0.05);
    // column-major W (4 x 3): bias column last
    Matrix w(4, 3);
    w.col(0) = eta_theta.segment(4, 4);
    w.col(1) = eta_theta.segment(8, 4);
    w.col(2) = eta_theta.segment(0, 4);
    const PolyExpPolicy poly(4, LinearMap::affine(2, 4), Eigen::Map<const Vector>(w.data(), 12));
    EXPECT_LE(score_error(poly, s, poly.sample(s, rng).action), 1e-4) << "polyexp " << k;

    const GaussianExpFamily gef(affine_gaussian(d, rng));
    EXPECT_LE(score_error(gef, s, gef.sample(s, rng).action), 1e-4) << "gaussian expfam " << k;

    const SoftmaxPolicy sm(LinearMap::affine(2, 3), test::uniform_vector(rng, 9, -2, 2));
    const int a = sm.sample(s, rng);
    const Vector analytic = sm.grad_log_prob(s, a).flat();
    SoftmaxPolicy copy = sm;
    const Vector fd = test::numeric_gradient(
        [&](const Vector& th) {
          copy.set_params(th);
          return copy.log_prob(s, a);
        },
        sm.params());
    EXPECT_LE((analytic - fd).norm() / std::max(1.0, fd.norm()), 1e-4) << "softmax " << k;
  }
}

TEST(GaussianSample, MomentMatching) {
  Rng rng = make_rng(4);
  const GaussianPolicy p = affine_gaussian(2, rng);
  const State s = State::continuous(Vector::Constant(2, 0.3));
  const long n = 100000;
  Vector mean = Vector::Zero(2);
  Matrix second = Matrix::Zero(2, 2);
  std::vector<Vector> xs;
  for (long i = 0; i < n; ++i) {
    const Vector a = p.sample(s, rng).action;
    mean += a;
    second += a * a.transpose();
  }
  mean /= n;
  const Matrix cov = second / n - mean * mean.transpose();
  const Matrix truth = p.covariance(s);
  for (int i = 0; i < 2; ++i) {
    EXPECT_LE(std::abs(mean(i) - p.mu(s)(i)), 4.0 * std::sqrt(truth(i, i) / n));
    for (int j = 0; j < 2; ++j) {
      const double se = std::sqrt((truth(i, i) * truth(j, j) + truth(i, j) * truth(i, j)) / n);
      EXPECT_LE(std::abs(cov(i, j) - truth(i, j)), 4.0 * se);
    }
  }
}

TEST(GaussianSample, KolmogorovSmirnov) {
  const GaussianPolicy p = GaussianPolicy::constant(Vector::Constant(1, 0.7), Matrix::Constant(1, 1, 1.3));
  Rng rng = make_rng(8);
  std::vector<double> xs;
  const int n = 10000;
  for (int i = 0; i < n; ++i) xs.push_back(p.sample(State::continuous(Vector()), rng).action(0));
  // 1% critical value
  EXPECT_LT(ks_statistic_normal(xs, 0.7, 1.3), 1.63 / std::sqrt(n));
}

TEST(GaussianSample, SmallestAllowedSigmaStaysInSixSigma) {
  const double sd = 2e-12;
  const GaussianPolicy p = GaussianPolicy::constant(Vector::Constant(1, 0.25), Matrix::Constant(1, 1, sd));
  Rng rng = make_rng(1);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_LE(std::abs(p.sample(State::continuous(Vector()), rng).action(0) - 0.25), 6.0 * sd + 1e-16);
  }
  const GaussianPolicy degenerate = GaussianPolicy::constant(Vector::Zero(1), Matrix::Constant(1, 1, 1e-13));
  EXPECT_THROW(degenerate.sample(State::continuous(Vector()), rng), DomainError);
}

TEST(DiracSample, ReturnsActionMapExactly) {
  const DiracPolicy p(LinearMap::affine(2, 2), Vector::LinSpaced(6, -1, 1));
  const State s = State::continuous(Vector::Constant(2, 0.4));
  const ActionSample a = p.sample(s, 3);
  EXPECT_EQ(a.action, p.action(s));
  EXPECT_THROW(p.log_prob(s, a.action), DomainError);
}

TEST(ClippedSample, AllInsideUnitBox) {
  const ClippedPolicy p(GaussianPolicy::constant(Vector::Constant(2, 0.5), Matrix::Identity(2, 2)));
  Rng rng = make_rng(6);
  for (int i = 0; i < 10000; ++i) {
    const ActionSample a = p.sample(State::continuous(Vector()), rng);
    EXPECT_TRUE((a.action.array() >= 0.0).all() && (a.action.array() <= 1.0).all());
    EXPECT_EQ(a.action, ClippedPolicy::clip(a.pre_action));
  }
}

TEST(ClippedSample, AtomsMatchBaseTailMasses) {
  const ClippedPolicy p(GaussianPolicy::constant(Vector::Constant(1, 0.8), Matrix::Constant(1, 1, 0.4)));
  const State s = State::continuous(Vector());
  const Matrix atoms = p.atom_masses(s);
  EXPECT_NEAR(atoms(0, 0), normal_cdf(-0.8 / 0.4), 1e-14);
  EXPECT_NEAR(atoms(0, 1), 1.0 - normal_cdf(0.2 / 0.4), 1e-14);
  Rng rng = make_rng(12);
  const long n = 100000;
  long lo = 0, hi = 0;
  for (long i = 0; i < n; ++i) {
    const double a = p.sample(s, rng).action(0);
    lo += a == 0.0;
    hi += a == 1.0;
  }
  for (const auto& [count, mass] : {std::pair{lo, atoms(0, 0)}, std::pair{hi, atoms(0, 1)}}) {
    const double se = std::sqrt(mass * (1.0 - mass) / n);
    EXPECT_LE(std::abs(static_cast<double>(count) / n - mass), 3.0 * se);
  }
}

TEST(Moments, GaussianClosedForms) {
  const double mu = 0.7, sd = 1.3;
  const MomentVector m = gaussian_moments(Vector::Constant(1, mu), Matrix::Constant(1, 1, sd * sd), 4);
  EXPECT_EQ(m.at({0}), 1.0);
  EXPECT_NEAR(m.at({2}) - m.at({1}) * m.at({1}), sd * sd, 1e-9);
  EXPECT_NEAR(m.at({3}), mu * mu * mu + 3 * mu * sd * sd, 1e-12);
  EXPECT_NEAR(m.at({4}), std::pow(mu, 4) + 6 * mu * mu * sd * sd + 3 * std::pow(sd, 4), 1e-12);
  const MomentVector z = gaussian_moments(Vector::Zero(1), Matrix::Identity(1, 1), 9);
  for (int k = 1; k <= 9; k += 2) EXPECT_EQ(z.at({k}), 0.0);
}

TEST(Moments, MultivariateDegreeLimit) {
  EXPECT_NO_THROW(gaussian_moments(Vector::Zero(2), Matrix::Identity(2, 2), kMaxMultivariateMomentDegree));
  EXPECT_THROW(gaussian_moments(Vector::Zero(2), Matrix::Identity(2, 2), kMaxMultivariateMomentDegree + 1),
               ConfigError);
}

TEST(Moments, MatchMonteCarloWithinFourSe) {
  Rng rng = make_rng(2024);
  const long n = 1000000;
  for (int k = 0; k < 10; ++k) {
    const double mu = test::uniform(rng, -1, 1), sd = test::uniform(rng, 0.2, 1.5);
    const MomentVector m = gaussian_moments(Vector::Constant(1, mu), Matrix::Constant(1, 1, sd * sd), 4);
    std::normal_distribution<double> nd(mu, sd);
    double sum[5] = {0}, sum2[5] = {0};
    for (long i = 0; i < n; ++i) {
      const double a = nd(rng);
      double p = 1.0;
      for (int j = 1; j <= 4; ++j) {
        p *= a;
        sum[j] += p;
        sum2[j] += p * p;
      }
    }
    for (int j = 1; j <= 4; ++j) {
      const double mean = sum[j] / n;
      const double se = std::sqrt((sum2[j] / n - mean * mean) / (n - 1));
      EXPECT_LE(std::abs(mean - m.at({j})), 4.0 * se) << "instance " << k << " degree " << j;
    }
  }
}

TEST(Moments, GammaAndPolyExpAgainstQuadrature) {
  const State s = State::continuous(Vector());
  const GammaPolicy gamma(2.5, LinearMap::constant(1), Vector::Constant(1, std::log(1.7)));
  const MomentVector gm = gamma.moments(s, 4);
  // E[a^k] = k-rising factorial of shape / rate^k
  double expected = 1.0;
  for (int k = 1; k <= 4; ++k) {
    expected *= (2.5 + k - 1) / 1.7;
    EXPECT_NEAR(gm.at({k}), expected, 1e-12 * expected);
  }
  const PolyExpPolicy poly(4, LinearMap::constant(4), (Vector(4) << 0.3, 0.2, -0.5, -0.3).finished());
  const MomentVector pm = poly.moments(s, 4);
  EXPECT_TRUE(pm.warning.empty());
  const QuadratureRule r = composite_gauss_legendre(32, 64, -8, 8);
  double z = 0.0, m2 = 0.0;
  for (Eigen::Index i = 0; i < r.nodes.size(); ++i) {
    const double a = r.nodes(i);
    const double w = r.weights(i) * std::exp(0.3 * a + 0.2 * a * a - 0.5 * a * a * a - 0.3 * a * a * a * a);
    z += w;
    m2 += w * a * a;
  }
  EXPECT_NEAR(pm.at({2}), m2 / z, 1e-9);
  EXPECT_FALSE(poly.moments(s, PolyExpPolicy::kMomentDegreeBudget + 2).warning.empty());
}

TEST(ExpFamilyDensity, IntegratesToOne) {
  const State s = State::continuous(Vector());
  const PolyExpPolicy poly(4, LinearMap::constant(4), (Vector(4) << -0.4, 0.6, 0.1, -0.8).finished());
  const GammaPolicy gamma(1.8, LinearMap::constant(1), Vector::Constant(1, 0.2));
  const QuadratureRule rp = composite_gauss_legendre(32, 64, -8, 8);
  const QuadratureRule rg = composite_gauss_legendre(32, 400, 0, 60);
  double zp = 0.0, zg = 0.0;
  for (Eigen::Index i = 0; i < rp.nodes.size(); ++i) zp += rp.weights(i) * std::exp(poly.log_prob(s, rp.nodes.segment(i, 1)));
  for (Eigen::Index i = 0; i < rg.nodes.size(); ++i) zg += rg.weights(i) * std::exp(gamma.log_prob(s, rg.nodes.segment(i, 1)));
  EXPECT_NEAR(zp, 1.0, 1e-6);
  EXPECT_NEAR(zg, 1.0, 1e-6);
  EXPECT_THROW(gamma.log_prob(s, Vector::Constant(1, -0.1)), DomainError);
}

TEST(Squash, FixedPointsAndRoundTrip) {
  EXPECT_EQ(squash(Squash::sigmoid, 0.0), 0.5);
  EXPECT_EQ(squash(Squash::exp, 0.0), 1.0);
  EXPECT_EQ(log_det_jacobian(Squash::exp, Vector::Zero(1)), 0.0);
  Rng rng = make_rng(3);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vector b = test::uniform_vector(rng, 1, -5, 5);
    worst = std::max(worst, std::abs(unsquash(Squash::sigmoid, squash(Squash::sigmoid, b))(0) - b(0)));
    const Vector a = test::uniform_vector(rng, 1, 0.01, 0.99);
    worst = std::max(worst, std::abs(squash(Squash::sigmoid, unsquash(Squash::sigmoid, a))(0) - a(0)));
  }
  EXPECT_LT(worst, 1e-12);
  EXPECT_THROW(unsquash(Squash::sigmoid, Vector::Constant(1, 1.0)), DomainError);
  EXPECT_THROW(unsquash(Squash::sigmoid, Vector::Zero(1)), DomainError);
  EXPECT_THROW(unsquash(Squash::exp, Vector::Zero(1)), DomainError);
}

TEST(SquashedDensity, ChangeOfVariablesAndNormalisation) {
  const State s = State::continuous(Vector());
  const GaussianPolicy base = GaussianPolicy::constant(Vector::Constant(1, 0.3), Matrix::Constant(1, 1, 0.5));
  const SquashedPolicy sig(base, Squash::sigmoid);
  const SquashedPolicy ex(base, Squash::exp);
  const Vector a = Vector::Constant(1, 0.6);
  const Vector b = unsquash(Squash::sigmoid, a);
  EXPECT_NEAR(sig.log_prob(s, a), base.log_prob(s, b) - log_det_jacobian(Squash::sigmoid, b), 1e-12);

  const QuadratureRule r01 = composite_gauss_legendre(32, 200, 0, 1);
  const QuadratureRule rpos = composite_gauss_legendre(32, 400, 0, std::exp(0.3 + 10 * 0.5));
  double z1 = 0.0, z2 = 0.0;
  for (Eigen::Index i = 0; i < r01.nodes.size(); ++i) z1 += r01.weights(i) * std::exp(sig.log_prob(s, r01.nodes.segment(i, 1)));
  for (Eigen::Index i = 0; i < rpos.nodes.size(); ++i) z2 += rpos.weights(i) * std::exp(ex.log_prob(s, rpos.nodes.segment(i, 1)));
  EXPECT_NEAR(z1, 1.0, 1e-5);
  EXPECT_NEAR(z2, 1.0, 1e-5);
  EXPECT_THROW(ex.log_prob(s, Vector::Constant(1, -1.0)), DomainError);
}

TEST(Softmax, ProbabilitiesNormalised) {
  Rng rng = make_rng(10);
  for (int k = 0; k < 20; ++k) {
    const SoftmaxPolicy p(LinearMap::affine(3, 4), test::uniform_vector(rng, 16, -5, 5));
    const Vector pr = p.probs(State::continuous(test::uniform_vector(rng, 3, -2, 2)));
    EXPECT_NEAR(pr.sum(), 1.0, 1e-12);
    EXPECT_TRUE((pr.array() > 0.0).all());
  }
}

TEST(EntropyGradient, UniformIsStationary) {
  const SoftmaxPolicy p = SoftmaxPolicy::tabular(1, 4, Vector::Constant(4, 0.7));
  EXPECT_LE(policy_entropy_grad(p, State::tabular(0)).flat().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(EntropyGradient, MatchesFiniteDifferences) {
  const SoftmaxPolicy p = SoftmaxPolicy::tabular(1, 2, (Vector(2) << 1, 0).finished());
  const State s = State::tabular(0);
  SoftmaxPolicy copy = p;
  const Vector fd = test::numeric_gradient(
      [&](const Vector& th) {
        copy.set_params(th);
        return copy.entropy(s);
      },
      p.params(), 1e-5);
  EXPECT_LE((policy_entropy_grad(p, s).flat() - fd).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(EntropyGradient, ShiftInvariant) {
  const Vector logits = (Vector(3) << 0.4, -1.0, 2.0).finished();
  const SoftmaxPolicy a = SoftmaxPolicy::tabular(1, 3, logits);
  const SoftmaxPolicy b = SoftmaxPolicy::tabular(1, 3, logits.array() + 3.5);
  EXPECT_LE((policy_entropy_grad(a, State::tabular(0)).flat() - policy_entropy_grad(b, State::tabular(0)).flat())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}
