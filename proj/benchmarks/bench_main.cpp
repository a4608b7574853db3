#include <benchmark/benchmark.h>

#include "lnv/netsys.hpp"
#include "lnv/rng.hpp"
#include "lnv/tracker.hpp"

namespace {

lnv::NetProblem problem_for(std::vector<int> dims) {
  lnv::Architecture arch{std::move(dims), false};
  return lnv::make_problem(arch, lnv::generate_realizable_data(arch, 2, 7).data);
}

lnv::CVector random_point(std::size_t n, std::uint64_t seed) {
  lnv::Rng rng(seed);
  lnv::CVector p(n);
  for (auto& z : p) z = rng.complex_normal();
  return p;
}

void BM_GradientValuesAndJacobian(benchmark::State& state) {
  const auto problem = problem_for({2, 2, static_cast<int>(state.range(0))});
  const auto& sys = problem.gradient;
  const auto p = random_point(sys.nvars(), 3);
  lnv::CVector out(sys.size());
  lnv::CMatrix jac(sys.size(), sys.nvars());
  for (auto _ : state) {
    sys.evaluator().values_and_jacobian(p, out, jac);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_GradientValuesAndJacobian)->Arg(2)->Arg(3);

void BM_LossHessian(benchmark::State& state) {
  const auto problem = problem_for({2, 2, 2});
  const auto p = random_point(problem.arch.nvars(), 5);
  for (auto _ : state) benchmark::DoNotOptimize(lnv::hessian_at(problem.loss, p));
}
BENCHMARK(BM_LossHessian);

void BM_SolveOneOneOne(benchmark::State& state) {
  const auto problem = problem_for({1, 1, 1});
  lnv::SolveOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(lnv::solve_system(problem.gradient, opts).solutions.size());
}
BENCHMARK(BM_SolveOneOneOne)->Unit(benchmark::kMillisecond);

void BM_TrackTotalDegreePaths(benchmark::State& state) {
  const auto problem = problem_for({2, 1, 2});
  const auto start = lnv::start_total_degree(problem.gradient);
  const lnv::Homotopy h(start.system, problem.gradient, std::polar(1.0, 0.7));
  const lnv::TrackSettings s;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lnv::track_path(start.solutions[i % start.solutions.size()], h, s));
    ++i;
  }
}
BENCHMARK(BM_TrackTotalDegreePaths)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
