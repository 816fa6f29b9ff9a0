#include <benchmark/benchmark.h>

#include "blocksd/ocp.hpp"
#include "blocksd/quadform.hpp"

using namespace blocksd;

static void BM_QuadStep(benchmark::State& state) {
  const Eigen::Index m = 256;
  QuadraticProblem p = random_spd(m, 0.5, 2.0, 42);
  BlockPartition part = make_partition(m, state.range(0));
  Eigen::VectorXd x = Eigen::VectorXd::Ones(m);
  for (auto _ : state) {
    StepSystem ss = assemble_step_system(p, part, x);
    benchmark::DoNotOptimize(ss.theta);
  }
}
BENCHMARK(BM_QuadStep)->Arg(1)->Arg(4)->Arg(16)->Arg(64);

static void BM_ForwardSolve(benchmark::State& state) {
  HeatDiscretization d(static_cast<int>(state.range(0)), 0.01, 1.6, 0.05);
  Eigen::VectorXd y0 = Eigen::VectorXd::Ones(d.n_state());
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_solve(d, y0, nullptr, nullptr));
  }
}
BENCHMARK(BM_ForwardSolve)->Arg(16)->Arg(32)->Arg(64);

static void BM_OcpStepSystem(benchmark::State& state) {
  ControlProblem prob = make_problem(ProblemLabel::P1, ControlKind::Distributed,
                                     1e-2, 16, 0.01, 1.6, 0.05);
  BlockPartition part = make_partition(prob.disc.Nt(), 8);
  GradientResult gr =
      evaluate_gradient(prob, ControlField::zero(prob.disc, prob.kind));
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    StepSystem ss = assemble_Dk_Hk(prob, part, gr.g, threads);
    benchmark::DoNotOptimize(ss.theta);
  }
}
BENCHMARK(BM_OcpStepSystem)->Arg(1)->Arg(2)->Arg(4);

BENCHMARK_MAIN();
