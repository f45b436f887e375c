#include <benchmark/benchmark.h>

#include "dnrp/experiment.hpp"
#include "dnrp/scenario.hpp"
#include "dnrp/verifier.hpp"

namespace {

/// Generated topology with `prefixes` prefixes, each at one router spread over the id range.
dnrp::ScenarioScript anchored(std::size_t prefixes, dnrp::Protocol protocol) {
  dnrp::ScenarioScript s;
  s.topology = dnrp::generate_topology({});
  s.protocol = protocol;
  const std::size_t n = s.topology.routers().size();
  for (std::size_t i = 0; i < prefixes; ++i) {
    s.topology.add_anchor(dnrp::PrefixName("p" + std::to_string(i)),
                          dnrp::RouterId(static_cast<std::uint32_t>(1 + (i * 37) % n)));
  }
  return s;
}

void BM_Converge(benchmark::State& state, dnrp::Protocol protocol) {
  const dnrp::ScenarioScript s = anchored(static_cast<std::size_t>(state.range(0)), protocol);
  dnrp::RunOptions opts;
  opts.check = dnrp::CheckMode::kOff;
  opts.record_trace = false;
  std::uint64_t messages = 0;
  for (auto _ : state) {
    const dnrp::SimulationTrace t = dnrp::run_script(s, opts);
    messages = t.metrics.messages_total;
    benchmark::DoNotOptimize(t.operations);
  }
  state.counters["messages"] = static_cast<double>(messages);
}
BENCHMARK_CAPTURE(BM_Converge, dnrp, dnrp::Protocol::kDnrp)->Arg(1)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Converge, ils, dnrp::Protocol::kIls)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_LinkFailure(benchmark::State& state) {
  dnrp::ScenarioScript s = anchored(static_cast<std::size_t>(state.range(0)), dnrp::Protocol::kDnrp);
  const dnrp::LinkKey victim = s.topology.links().begin()->first;
  s.events.emplace_back(1000, dnrp::LinkDown{victim.a, victim.b});
  dnrp::RunOptions opts;
  opts.check = dnrp::CheckMode::kOff;
  opts.record_trace = false;
  for (auto _ : state) benchmark::DoNotOptimize(dnrp::run_script(s, opts).metrics.messages_total);
}
BENCHMARK(BM_LinkFailure)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
  const dnrp::ScenarioScript s = anchored(static_cast<std::size_t>(state.range(0)), dnrp::Protocol::kDnrp);
  for (auto _ : state) {
    for (const auto& [p, a] : s.topology.anchors()) benchmark::DoNotOptimize(dnrp::oracle(s.topology, a, p));
  }
}
BENCHMARK(BM_Oracle)->Arg(1)->Arg(6);

void BM_EveryStepChecks(benchmark::State& state) {
  const dnrp::ScenarioScript s = anchored(4, dnrp::Protocol::kDnrp);
  dnrp::RunOptions opts;
  opts.check = dnrp::CheckMode::kEveryStep;
  opts.record_trace = false;
  for (auto _ : state) benchmark::DoNotOptimize(dnrp::run_script(s, opts).violations.size());
}
BENCHMARK(BM_EveryStepChecks)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
