#include <benchmark/benchmark.h>

#include "qf/boolcompile.hpp"
#include "qf/corpus.hpp"

namespace {

qf::Circuit chain(int gates) {
  qf::Rng rng(7);
  qf::Circuit c;
  c.wires = gates + 1;
  for (int w = 0; w <= gates; ++w) c.inputs.push_back(qf::InputLabel::var(w));
  for (int k = 0; k < gates; ++k) c.gates.push_back(qf::make_gate(qf::haar_unitary(4, rng), {k, k + 1}, k));
  c.output = gates;
  return c;
}

void BM_Compile(benchmark::State& state) {
  const qf::Circuit f = chain(4);
  const int mu = static_cast<int>(state.range(0));
  std::size_t size = 0;
  for (auto _ : state) {
    const qf::Netlist n = qf::compile_formula(f, mu);
    size = qf::netlist_stats(n).size;
    benchmark::DoNotOptimize(size);
  }
  state.counters["size"] = static_cast<double>(size);
}

void BM_EvalAll(benchmark::State& state) {
  const qf::Netlist n = qf::compile_formula(chain(4), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qf::eval_netlist_all(n));
}

}  // namespace

BENCHMARK(BM_Compile)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvalAll)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
