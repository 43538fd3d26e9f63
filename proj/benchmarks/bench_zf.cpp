#include <benchmark/benchmark.h>

#include "zf/analysis.hpp"
#include "zf/ct_bridge.hpp"
#include "zf/hard_factorization.hpp"
#include "zf/plants.hpp"
#include "zf/sdp.hpp"

using namespace zf;

static void BM_NyquistValue(benchmark::State& state) {
  const auto g = find_plant("ex1")->g;
  for (auto _ : state) benchmark::DoNotOptimize(nyquist_value(g));
}
BENCHMARK(BM_NyquistValue)->Unit(benchmark::kMillisecond);

static void BM_CircleCriterion(benchmark::State& state) {
  const auto g = find_plant("ex4")->g;
  for (auto _ : state) benchmark::DoNotOptimize(circle_criterion(g));
}
BENCHMARK(BM_CircleCriterion)->Unit(benchmark::kMillisecond);

// One feasibility solve of the hard factorization LMI at order n.
static void BM_SolveHard(benchmark::State& state) {
  const auto g = find_plant("ex4")->g;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_hard(g, 2.5, n, n, false));
}
BENCHMARK(BM_SolveHard)->Arg(1)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_VerifyFdi(benchmark::State& state) {
  const auto g = find_plant("ex1")->g;
  const FirMultiplier m(1, 1, {-0.5, 1.0, -0.45});
  for (auto _ : state) benchmark::DoNotOptimize(verify_fdi(m, g, 12.0));
}
BENCHMARK(BM_VerifyFdi)->Unit(benchmark::kMicrosecond);

static void BM_CtMaxSlope(benchmark::State& state) {
  const auto g = find_plant("ex9-ct")->g;
  const DelayMultiplier m{0.01, {{-70, -0.0227}, {-48, -0.0013}, {0, 1.0}, {1, -0.976}}};
  for (auto _ : state) benchmark::DoNotOptimize(ct_max_slope(m, g));
}
BENCHMARK(BM_CtMaxSlope)->Unit(benchmark::kMillisecond);

// Discrete Lyapunov feasibility AᵀXA − X < 0, X > 0 for a random stable A.
static void BM_SdpLyapunov(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
  a *= 0.9 / a.eigenvalues().cwiseAbs().maxCoeff();
  for (auto _ : state) {
    sdp::LmiProblem p;
    const auto x = p.add_symmetric("X", n);
    auto& pos = p.add_matrix_constraint(n, sdp::MatrixSense::negative_definite, "X>0");
    pos.add_congruence(x, Eigen::MatrixXd::Identity(n, n), -1.0);
    auto& lyap = p.add_matrix_constraint(n, sdp::MatrixSense::negative_definite, "lyap");
    lyap.add_congruence(x, a, 1.0);
    lyap.add_congruence(x, Eigen::MatrixXd::Identity(n, n), -1.0);
    benchmark::DoNotOptimize(sdp::solve_feasibility(p));
  }
}
BENCHMARK(BM_SdpLyapunov)->Arg(4)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
