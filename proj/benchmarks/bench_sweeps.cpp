#include <benchmark/benchmark.h>

#include "bergweight/bergman.hpp"

using namespace bergweight;

namespace {

void BM_HilbQuadrature(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const L2Model model(SectionSpace(k), MetricPotential::moment_linear(0.0, 0.3));
  for (auto _ : state) benchmark::DoNotOptimize(hilb_quadrature(model));
}
BENCHMARK(BM_HilbQuadrature)->RangeMultiplier(2)->Range(8, 256);

void BM_HilbGeneralMetric(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const MetricPotential u = MetricPotential::general([](const PointP1& x) { return 0.2 * std::real(x.a() * std::conj(x.b())); });
  const L2Model model(SectionSpace(k), u, VolumeMode::FixedBackground);
  for (auto _ : state) benchmark::DoNotOptimize(hilb_quadrature(model));
}
BENCHMARK(BM_HilbGeneralMetric)->RangeMultiplier(2)->Range(4, 32);

void BM_ToeplitzRadial(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const L2Model model(SectionSpace(k, 2), MetricPotential::constant(0.0));
  const HermitianNorm h = hilb_quadrature(model);
  const Symbol f = Symbol::radial([](double s) { return std::min(2.0 * s, 1.0); }, {0.5});
  for (auto _ : state) benchmark::DoNotOptimize(toeplitz_matrix(f, model, h));
}
BENCHMARK(BM_ToeplitzRadial)->RangeMultiplier(2)->Range(8, 128);

void BM_WeightOperatorDense(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const RingFiltration f = vanishing_order_filtration(2, CapMode::HardCap);
  const L2Model model(SectionSpace(k, 2), MetricPotential::constant(0.0));
  const HermitianNorm h = hilb_quadrature(model);
  const Index n = h.dim();
  const CMatrix g = h.gram() + 0.01 * CMatrix::Ones(n, n) * h.gram()(n / 2, n / 2).real();
  const HermitianNorm dense = HermitianNorm::make(g);
  const Filtration fk = f.at_degree(k);
  for (auto _ : state) benchmark::DoNotOptimize(weight_operator(fk, dense));
}
BENCHMARK(BM_WeightOperatorDense)->RangeMultiplier(2)->Range(8, 64);

void BM_QuotientNorm(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const RVector gk = fs_gram_diagonal(k);
  RVector up(gk.size() * gk.size());
  for (Index r = 0; r < gk.size(); ++r)
    for (Index q = 0; q < gk.size(); ++q) up(r * gk.size() + q) = gk(r) * gk(q);
  const CMatrix p = multiplication_matrix(k, k);
  for (auto _ : state) benchmark::DoNotOptimize(quotient_norm(up, p));
}
BENCHMARK(BM_QuotientNorm)->RangeMultiplier(2)->Range(8, 64);

}  // namespace

BENCHMARK_MAIN();
