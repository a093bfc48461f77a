#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "qgp/gp_kernels.hpp"
#include "qgp/kernels.hpp"

using namespace qgp;

namespace {

ComplexVector random_state(int width) {
  std::mt19937_64 g(1);
  std::normal_distribution<double> n;
  ComplexVector v(Eigen::Index{1} << width);
  for (auto& x : v) x = cplx(n(g), n(g));
  return v / v.norm();
}

const kernels::Mat2 kMix{cplx(0.6, 0.0), cplx(0.0, -0.8), cplx(0.0, -0.8), cplx(0.6, 0.0)};

template <auto Fn>
void one_qubit(benchmark::State& st) {
  ComplexVector v = random_state(static_cast<int>(st.range(0)));
  std::span<cplx> s(v.data(), static_cast<std::size_t>(v.size()));
  for (auto _ : st) {
    Fn(s, 3, kMix);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * v.size());
}

template <auto Fn>
void multiplexed(benchmark::State& st) {
  const int width = static_cast<int>(st.range(0));
  ComplexVector v = random_state(width);
  std::span<cplx> s(v.data(), static_cast<std::size_t>(v.size()));
  const std::vector<int> controls{0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<double> angles(256);
  for (std::size_t i = 0; i < angles.size(); ++i) angles[i] = 0.01 * static_cast<double>(i);
  for (auto _ : st) {
    Fn(s, controls, width - 1, angles);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * v.size());
}

gp::ChannelTimes grid_times(int per_channel) {
  RealVector t = RealVector::LinSpaced(per_channel, 0.0, 0.02);
  return {t, t, t};
}

template <auto Fn>
void joint_kernel(benchmark::State& st) {
  const auto times = grid_times(static_cast<int>(st.range(0)));
  gp::LineHyperParams th;
  th.current_kernel = {5000.0, 4e4};
  th.voltage_kernel = {5e4, 4e4};
  th.R = 0.064;
  th.L = 2.64e-5;
  for (auto _ : st) benchmark::DoNotOptimize(Fn(times, th));
}

}  // namespace

BENCHMARK(one_qubit<kernels::apply_1q>)->Name("apply_1q/omp")->DenseRange(14, 22, 4);
BENCHMARK(one_qubit<kernels::serial::apply_1q>)->Name("apply_1q/serial")->DenseRange(14, 22, 4);
BENCHMARK(multiplexed<kernels::apply_multiplexed_ry>)->Name("multiplexed_ry/omp")->DenseRange(14, 22, 4);
BENCHMARK(multiplexed<kernels::serial::apply_multiplexed_ry>)->Name("multiplexed_ry/serial")->DenseRange(14, 22, 4);
BENCHMARK(joint_kernel<gp::assemble_joint>)->Name("assemble_joint/omp")->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(joint_kernel<gp::serial::assemble_joint>)->Name("assemble_joint/serial")->RangeMultiplier(4)->Range(16, 1024);

BENCHMARK_MAIN();
