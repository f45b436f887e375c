#include "dnrp/scenario.hpp"

#include <set>

#include "dnrp/dnrp_router.hpp"
#include "dnrp/ils_router.hpp"
#include "dnrp/simulator.hpp"

namespace dnrp {

std::string_view to_string(Protocol p) { return p == Protocol::kDnrp ? "DNRP" : "ILS"; }

std::optional<Protocol> parse_protocol(std::string_view s) {
  if (s == "dnrp" || s == "DNRP") return Protocol::kDnrp;
  if (s == "ils" || s == "ILS") return Protocol::kIls;
  return std::nullopt;
}

std::string_view to_string(CheckMode m) {
  switch (m) {
    case CheckMode::kOff:
      return "off";
    case CheckMode::kCheckpoints:
      return "checkpoints";
    case CheckMode::kEveryStep:
      return "every-step";
  }
  return "?";
}

std::optional<CheckMode> parse_check_mode(std::string_view s) {
  if (s == "off") return CheckMode::kOff;
  if (s == "checkpoints") return CheckMode::kCheckpoints;
  if (s == "every-step") return CheckMode::kEveryStep;
  return std::nullopt;
}

std::uint64_t default_event_cap(const Topology& t, const std::vector<TimedEvent>& events) {
  std::set<PrefixName> prefixes;
  for (const auto& [p, anchors] : t.anchors()) prefixes.insert(p);
  std::set<LinkKey> links;
  for (const auto& [key, spec] : t.links()) links.insert(key);
  for (const auto& [at, ev] : events) {
    if (const auto* add = std::get_if<PrefixAdd>(&ev)) prefixes.insert(add->prefix);
    if (const auto* up = std::get_if<LinkUp>(&ev)) links.insert(LinkKey(up->a, up->b));
  }
  const std::uint64_t n_links = std::max<std::uint64_t>(links.size(), 1);
  const std::uint64_t n_prefixes = std::max<std::uint64_t>(prefixes.size(), 1);
  return 50 * n_links * n_prefixes;
}

namespace {

template <class Engine>
SimulationTrace run_with(const ScenarioScript& script, const RunOptions& opts, bool dnrp_rules) {
  SimulationTrace out;
  out.event_cap = opts.event_cap != 0 ? opts.event_cap : default_event_cap(script.topology, script.events);
  const bool need_trace = opts.record_trace || (dnrp_rules && opts.check != CheckMode::kOff);
  Simulator<Engine> sim(script.topology, SimOptions{need_trace, out.event_cap});
  for (const auto& [at, ev] : script.events) sim.schedule(at, ev);

  StepChecker checker(dnrp_rules);
  typename Simulator<Engine>::Observer observer;
  if (opts.check == CheckMode::kEveryStep) {
    observer = [&checker](const Simulator<Engine>& s, const StepInfo& info) {
      checker.observe(s.snapshots(), info.touched, info.event_index);
    };
  }
  const RunResult result = sim.run(observer);

  out.quiescent = result.quiescent;
  out.deliveries = result.deliveries;
  out.metrics = sim.metrics();
  out.operations = sim.operations();
  out.final_snapshots = sim.snapshots();
  out.final_topology = sim.topology();
  out.cycles = checker.cycles();
  out.violations = checker.violations();

  if (opts.check != CheckMode::kOff) {
    const std::uint64_t last = sim.event_index();
    std::set<PrefixName> prefixes;
    for (const RouterSnapshot& s : out.final_snapshots) {
      for (const auto& [p, v] : s.routes) prefixes.insert(p);
    }
    for (const PrefixName& p : prefixes) {
      if (auto cycle = check_loop_free(out.final_snapshots, p, last)) {
        ++out.cycles;
        out.violations.push_back(cycle->to_violation());
      }
    }
    if (out.quiescent) {
      for (const DivergenceReport& d : check_all_converged(out.final_snapshots, out.final_topology)) {
        out.violations.push_back(d.to_violation(last));
      }
    }
    if (dnrp_rules) {
      for (const RouterSnapshot& s : out.final_snapshots) {
        for (Violation& v : check_router(s, last)) out.violations.push_back(std::move(v));
      }
      for (Violation& v : audit_flags(sim.trace())) out.violations.push_back(std::move(v));
    }
  }
  if (opts.record_trace) out.entries = sim.trace();
  return out;
}

}  // namespace

SimulationTrace run_script(const ScenarioScript& script, const RunOptions& opts) {
  if (script.protocol == Protocol::kDnrp) return run_with<DnrpRouter>(script, opts, true);
  return run_with<IlsRouter>(script, opts, false);
}

}  // namespace dnrp
