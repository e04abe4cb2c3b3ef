#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "startetrad/gaussian_star.hpp"
#include "startetrad/io.hpp"
#include "startetrad/matrix.hpp"
#include "startetrad/report.hpp"
#include "startetrad/tetrad.hpp"

using namespace startetrad;

namespace {

SquareMatrix star_correlation(std::size_t q) {
  std::mt19937_64 gen(q);
  std::uniform_real_distribution<double> u(0.3, 0.9);
  std::vector<double> l(q);
  for (auto& x : l) x = u(gen);
  return build_correlation(Loadings(l));
}

void BM_PartialInvert(benchmark::State& state) {
  const auto q = static_cast<std::size_t>(state.range(0));
  const auto p = star_correlation(q);
  std::vector<Label> half(p.labels().begin(), p.labels().begin() + static_cast<long>(q / 2));
  for (auto _ : state) benchmark::DoNotOptimize(partial_invert(p, half));
}
BENCHMARK(BM_PartialInvert)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_FitTriple(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fit_loadings_triple(0.72, 0.63, 0.56));
}
BENCHMARK(BM_FitTriple);

void BM_FitLoadings(benchmark::State& state) {
  const auto p = star_correlation(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_loadings(p));
}
BENCHMARK(BM_FitLoadings)->Arg(4)->Arg(8)->Arg(16);

void BM_TetradCheck(benchmark::State& state) {
  const auto p = star_correlation(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tetrad_check(p));
}
BENCHMARK(BM_TetradCheck)->Arg(4)->Arg(8)->Arg(16);

void BM_AnalyzeCounts(benchmark::State& state) {
  const auto t = read_count_vector(std::string(STARTETRAD_DATA_DIR) + "/eph.counts");
  for (auto _ : state) benchmark::DoNotOptimize(analyze(t));
}
BENCHMARK(BM_AnalyzeCounts);

}  // namespace
BENCHMARK_MAIN();
