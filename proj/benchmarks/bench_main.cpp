#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "maxstab/likelihood.hpp"
#include "maxstab/mvn.hpp"
#include "maxstab/partitions.hpp"

using namespace maxstab;

namespace {

std::vector<double> block_values(int k) {
  std::mt19937_64 gen(static_cast<std::uint64_t>(k));
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  std::vector<double> v(std::size_t{1} << k);
  for (auto& x : v) x = unif(gen);
  return v;
}

Eigen::MatrixXd equicorrelated(int p, double rho) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(p, p, rho);
  s.diagonal().setOnes();
  return s;
}

ParamVector hr_line(int k) {
  Eigen::MatrixXd l2(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) l2(i, j) = 0.25 * std::abs(i - j);
  return ParamVector::huesler_reiss(l2);
}

void BM_PartitionDP(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto v = block_values(k);
  for (auto _ : state) benchmark::DoNotOptimize(sum_partition_products(v, k));
}
BENCHMARK(BM_PartitionDP)->DenseRange(2, 12, 2);

void BM_PartitionNaive(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto v = block_values(k);
  for (auto _ : state) benchmark::DoNotOptimize(sum_partition_products_naive(v, k));
}
BENCHMARK(BM_PartitionNaive)->DenseRange(2, 10, 2);

void BM_MvnCdf(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Eigen::MatrixXd s = equicorrelated(p, 0.5);
  const std::vector<double> upper(static_cast<std::size_t>(p), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(mvn_cdf(upper, s, 1e-5).value);
}
BENCHMARK(BM_MvnCdf)->DenseRange(1, 6)->Unit(benchmark::kMicrosecond);

void BM_LogDensityLogistic(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto m = make_model(ParamVector::logistic(k, 0.5));
  std::vector<double> z(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) z[static_cast<std::size_t>(i)] = 0.5 + 0.3 * i;
  for (auto _ : state) benchmark::DoNotOptimize(log_density(*m, z).log_density);
}
BENCHMARK(BM_LogDensityLogistic)->DenseRange(2, 10, 2)->Unit(benchmark::kMicrosecond);

void BM_LogDensityHueslerReiss(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto m = make_model(hr_line(k));
  std::vector<double> z(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) z[static_cast<std::size_t>(i)] = 0.5 + 0.3 * i;
  for (auto _ : state) benchmark::DoNotOptimize(log_density(*m, z).log_density);
}
BENCHMARK(BM_LogDensityHueslerReiss)->DenseRange(2, 4)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
