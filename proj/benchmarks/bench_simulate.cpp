#include <benchmark/benchmark.h>

#include "qf/corpus.hpp"
#include "qf/simulator.hpp"

namespace {

// A formula with the requested number of gates on as many wires as needed.
qf::Circuit formula_of(int gates) {
  qf::Rng rng(static_cast<std::uint64_t>(gates));
  qf::FormulaShape shape;
  shape.min_gates = gates;
  shape.max_gates = gates;
  shape.max_wires = 14;
  shape.dead_fraction = 0;
  return qf::random_formula(shape, rng);
}

void BM_FormulaRun(benchmark::State& state) {
  const qf::Circuit f = formula_of(static_cast<int>(state.range(0)));
  const qf::FormulaEvaluator eval(f);
  const qf::Assignment a = qf::Assignment::from_index(0, f.num_vars());
  for (auto _ : state) benchmark::DoNotOptimize(eval.run(a).p);
  state.counters["wires"] = f.wires;
}

void BM_Statevector(benchmark::State& state) {
  const qf::Circuit f = formula_of(static_cast<int>(state.range(0)));
  const qf::Assignment a = qf::Assignment::from_index(0, f.num_vars());
  for (auto _ : state) benchmark::DoNotOptimize(qf::statevector_run(f, a));
  state.counters["wires"] = f.wires;
}

}  // namespace

BENCHMARK(BM_FormulaRun)->Arg(4)->Arg(8)->Arg(13);
BENCHMARK(BM_Statevector)->Arg(4)->Arg(8)->Arg(13);

BENCHMARK_MAIN();
