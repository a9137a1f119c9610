#include <benchmark/benchmark.h>

#include <random>

#include "ineqcert/certify.hpp"
#include "ineqcert/lyapunov.hpp"
#include "ineqcert/spectral.hpp"
#include "ineqcert/transport.hpp"

namespace {

using namespace ineqcert;

GridMeasure gaussian(int dim, int n) {
  const std::vector<double> x0(static_cast<std::size_t>(dim), 0.0);
  return discretize(parse(dim == 1 ? "x1^2/2" : "(x1^2+x2^2)/2", dim), 6.0, n, x0);
}

DiscreteMeasure random_measure(std::mt19937_64& rng, int dim, int atoms) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DiscreteMeasure m;
  m.dim = dim;
  double total = 0.0;
  for (int i = 0; i < atoms; ++i) {
    for (int k = 0; k < dim; ++k) m.points.push_back(u(rng));
    m.weights.push_back(0.1 + u(rng));
    total += m.weights.back();
  }
  for (double& w : m.weights) w /= total;
  return m;
}

void BM_SpectralGap2d(benchmark::State& state) {
  const auto mu = gaussian(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(mu).eigenvalue);
}
BENCHMARK(BM_SpectralGap2d)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ExactTransport(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto a = random_measure(rng, 2, static_cast<int>(state.range(0)));
  const auto b = random_measure(rng, 2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_exact(a, b, 2).distance);
}
BENCHMARK(BM_ExactTransport)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Sinkhorn(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto a = random_measure(rng, 2, 64);
  const auto b = random_measure(rng, 2, 64);
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_sinkhorn(a, b, 2, eps).distance);
}
BENCHMARK(BM_Sinkhorn)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_HopfLax2d(benchmark::State& state) {
  const auto mu = gaussian(2, static_cast<int>(state.range(0)));
  std::vector<double> f(mu.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(mu.coordinate(i, 0)) + mu.coordinate(i, 1);
  for (auto _ : state) benchmark::DoNotOptimize(hopf_lax(f, 0.5, mu).data());
}
BENCHMARK(BM_HopfLax2d)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_QuadraticDriftAudit(benchmark::State& state) {
  const auto spec = parse("r^2*(2+sin(k*theta))", 2, {{"k", 4.0}});
  const std::vector<double> x0{0.0, 0.0};
  AuditDomain audit;
  audit.inner = 1.0;
  audit.outer = 4.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(check_quadratic_drift(spec, LyapunovFamily::exp_a_dist2(0.5), 1.0, x0, audit).margin);
}
BENCHMARK(BM_QuadraticDriftAudit)->Unit(benchmark::kMillisecond);

void BM_GaussianCertificateChain(benchmark::State& state) {
  const auto mu = gaussian(1, 256);
  for (auto _ : state) benchmark::DoNotOptimize(poincare_constant(mu).constant);
}
BENCHMARK(BM_GaussianCertificateChain)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
