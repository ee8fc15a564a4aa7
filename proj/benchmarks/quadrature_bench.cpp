#include <benchmark/benchmark.h>

#include "epg/quadrature/evaluators.hpp"

using namespace epg;

namespace {

struct Setup {
  GaussianPolicy policy;
  QuadricCritic critic;
  State state;
};

Setup make_setup(int d) {
  Rng rng = make_rng(static_cast<std::uint64_t>(d));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto draw = [&](int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = u(rng);
    return v;
  };
  Matrix l = 0.5 * Matrix::Identity(d, d);
  GaussianPolicy policy = GaussianPolicy::constant(draw(d), l);
  Matrix a = Matrix::NullaryExpr(d, d, [&] { return u(rng); });
  QuadricCritic critic = QuadricCritic::constant(-(a * a.transpose()), draw(d), 0.0);
  return {std::move(policy), std::move(critic), State::continuous(Vector())};
}

void BM_Analytic(benchmark::State& st) {
  const Setup s = make_setup(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(integrate_gaussian_quadric(s.policy, s.critic, s.state));
}
BENCHMARK(BM_Analytic)->DenseRange(1, 3);

void BM_ExpFamily(benchmark::State& st) {
  const Setup s = make_setup(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(integrate_expfam_polynomial(s.policy, s.critic, s.state));
}
BENCHMARK(BM_ExpFamily)->DenseRange(1, 3);

void BM_GaussLegendre(benchmark::State& st) {
  const Setup s = make_setup(static_cast<int>(st.range(0)));
  const auto bounds = gaussian_bounds(s.policy, s.state);
  for (auto _ : st) benchmark::DoNotOptimize(integrate_gauss_legendre(s.policy, s.critic, s.state, 32, bounds));
}
BENCHMARK(BM_GaussLegendre)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& st) {
  const Setup s = make_setup(2);
  for (auto _ : st) {
    benchmark::DoNotOptimize(integrate_monte_carlo(s.policy, s.critic, s.state, st.range(0), nullptr, 1));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_MonteCarlo)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
