#include "dnrp/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <type_traits>

#include "dnrp/dnrp_router.hpp"
#include "dnrp/ils_router.hpp"
#include "dnrp/simulator.hpp"

namespace dnrp {

std::string_view to_string(ScenarioKind s) {
  switch (s) {
    case ScenarioKind::kPrefixAdd:
      return "prefix-add";
    case ScenarioKind::kPrefixDelete:
      return "prefix-del";
    case ScenarioKind::kLinkFail:
      return "link-fail";
    case ScenarioKind::kLinkRecover:
      return "link-recover";
  }
  return "?";
}

std::optional<ScenarioKind> parse_scenario(std::string_view s) {
  for (ScenarioKind k : {ScenarioKind::kPrefixAdd, ScenarioKind::kPrefixDelete, ScenarioKind::kLinkFail,
                         ScenarioKind::kLinkRecover}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

namespace {

std::mt19937_64 rng_for(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  for (std::uint64_t p : parts) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::vector<RouterId> choose(std::mt19937_64& rng, std::vector<RouterId> pool, std::size_t k) {
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::string prefix_name(std::size_t i, std::size_t count) {
  std::ostringstream os;
  os << 'p' << std::setw(static_cast<int>(std::to_string(count).size())) << std::setfill('0') << i;
  return os.str();
}

const PrefixName kNewPrefix{"new-prefix"};

/// Scripted change for one cell. `setup` runs unmeasured before `change`.
struct Change {
  std::vector<ExternalEvent> setup;
  std::vector<ExternalEvent> change;
};

Change make_change(ScenarioKind kind, std::mt19937_64& rng, const Topology& topo, const std::vector<RouterId>& pool,
                   std::size_t replicas) {
  Change c;
  switch (kind) {
    case ScenarioKind::kPrefixAdd:
      for (RouterId a : choose(rng, pool, replicas)) c.change.push_back(PrefixAdd{a, kNewPrefix});
      break;
    case ScenarioKind::kPrefixDelete: {
      const auto& anchors = topo.anchors();
      auto it = std::next(anchors.begin(), static_cast<std::ptrdiff_t>(pick(rng, anchors.size())));
      auto victim = std::next(it->second.begin(), static_cast<std::ptrdiff_t>(pick(rng, it->second.size())));
      c.change.push_back(PrefixDelete{*victim, it->first});
      break;
    }
    case ScenarioKind::kLinkFail:
    case ScenarioKind::kLinkRecover: {
      const auto& links = topo.links();
      auto it = std::next(links.begin(), static_cast<std::ptrdiff_t>(pick(rng, links.size())));
      const LinkDown down{it->first.a, it->first.b};
      if (kind == ScenarioKind::kLinkFail) {
        c.change.push_back(down);
      } else {
        c.setup.push_back(down);
        c.change.push_back(LinkUp{it->first.a, it->first.b, it->second.cost, it->second.delay});
      }
      break;
    }
  }
  return c;
}

struct CellContext {
  const ExperimentPlan& plan;
  ExperimentResult& result;
  std::uint64_t cap;
};

void record(CellContext& ctx, std::vector<Violation> found, MetricsRow& row) {
  row.violations += found.size();
  for (Violation& v : found) {
    if (ctx.result.violations.size() < 100) ctx.result.violations.push_back(std::move(v));
  }
}

template <class Engine>
std::vector<Violation> quiescent_checks(const Simulator<Engine>& sim, bool dnrp_rules, std::uint64_t& cycles) {
  std::vector<Violation> out;
  const auto& snaps = sim.snapshots();
  const std::uint64_t last = sim.event_index();
  std::set<PrefixName> prefixes;
  for (const RouterSnapshot& s : snaps) {
    for (const auto& [p, v] : s.routes) prefixes.insert(p);
  }
  for (const PrefixName& p : prefixes) {
    if (auto cycle = check_loop_free(snaps, p, last)) {
      ++cycles;
      out.push_back(cycle->to_violation());
    }
  }
  for (const DivergenceReport& d : check_all_converged(snaps, sim.topology())) out.push_back(d.to_violation(last));
  if (dnrp_rules) {
    for (const RouterSnapshot& s : snaps) {
      for (Violation& v : check_router(s, last)) out.push_back(std::move(v));
    }
  }
  return out;
}

template <class Engine>
MetricsRow measure(CellContext& ctx, const Simulator<Engine>& base, const Change& change, bool dnrp_rules) {
  const ExperimentPlan& plan = ctx.plan;
  Simulator<Engine> sim = base;
  sim.set_options(SimOptions{false, ctx.cap});
  if (!change.setup.empty()) {
    for (const ExternalEvent& ev : change.setup) sim.schedule(sim.now() + 1, ev);
    if (!sim.run().quiescent) throw std::runtime_error("scenario setup did not reach quiescence");
  }

  const bool audit = dnrp_rules && plan.check != CheckMode::kOff;
  sim.set_options(SimOptions{audit, ctx.cap});
  sim.reset_metrics();
  sim.clear_trace();
  const std::uint64_t ops_before = sim.operations();
  const Tick at = sim.now() + 1;
  for (const ExternalEvent& ev : change.change) sim.schedule(at, ev);

  StepChecker checker(dnrp_rules);
  typename Simulator<Engine>::Observer observer;
  if (plan.check == CheckMode::kEveryStep) {
    observer = [&checker](const Simulator<Engine>& s, const StepInfo& info) {
      checker.observe(s.snapshots(), info.touched, info.event_index);
    };
  }
  const RunResult rr = sim.run(observer);

  MetricsRow row;
  const Metrics& m = sim.metrics();
  row.messages_by_kind = m.messages_by_kind;
  row.messages_total = m.messages_total;
  row.updates_total = m.updates_total;
  row.operations_total = sim.operations() - ops_before;
  row.convergence_ticks = m.last_tick - at;
  row.quiescent = rr.quiescent;
  if (!dnrp_rules && plan.hello_accounting) {
    const std::uint64_t hellos = 2 * sim.topology().links().size() * (row.convergence_ticks / plan.hello_interval + 1);
    row.messages_by_kind["HELLO"] += hellos;
    row.messages_total += hellos;
  }

  ctx.result.cycles += checker.cycles();
  record(ctx, checker.violations(), row);
  if (plan.check != CheckMode::kOff) {
    if (rr.quiescent) record(ctx, quiescent_checks(sim, dnrp_rules, ctx.result.cycles), row);
    if (audit) record(ctx, audit_flags(sim.trace()), row);
  }
  return row;
}

template <class Engine>
Simulator<Engine> converge(CellContext& ctx, const Topology& topo, bool dnrp_rules) {
  Simulator<Engine> sim(topo, SimOptions{false, ctx.cap});
  // Base convergence is not measured, so ILS runs Dijkstra once at the end.
  constexpr bool kLinkState = std::is_same_v<Engine, IlsRouter>;
  if constexpr (kLinkState) {
    for (RouterId r : topo.routers()) sim.engine(r).hold_routes(true);
  }
  if (!sim.run().quiescent) throw std::runtime_error("initial convergence did not reach quiescence");
  if constexpr (kLinkState) {
    for (RouterId r : topo.routers()) sim.engine(r).hold_routes(false);
  }
  if (ctx.plan.check != CheckMode::kOff) {
    MetricsRow scratch;
    record(ctx, quiescent_checks(sim, dnrp_rules, ctx.result.cycles), scratch);
  }
  return sim;
}

template <class Engine>
void run_protocol(CellContext& ctx, Protocol protocol, const Topology& topo, const std::vector<RouterId>& pool,
                  std::size_t replicas, std::size_t rep) {
  const bool dnrp_rules = protocol == Protocol::kDnrp;
  const Simulator<Engine> base = converge<Engine>(ctx, topo, dnrp_rules);
  for (ScenarioKind kind : ctx.plan.scenarios) {
    auto rng = rng_for({ctx.plan.seed, rep, replicas, static_cast<std::uint64_t>(kind) + 1});
    const Change change = make_change(kind, rng, topo, pool, replicas);
    MetricsRow row = measure(ctx, base, change, dnrp_rules);
    row.scenario = std::string(to_string(kind));
    row.protocol = protocol;
    row.replicas = replicas;
    row.repetition = rep;
    ctx.result.rows.push_back(std::move(row));
  }
}

}  // namespace

Topology generate_topology(const GeneratorOptions& opts) {
  if (opts.nodes < 2) throw std::invalid_argument("generator needs at least two nodes");
  if (opts.links < opts.nodes - 1) throw std::invalid_argument("too few links for a connected topology");
  if (opts.links > opts.nodes * (opts.nodes - 1) / 2) throw std::invalid_argument("too many links for a simple graph");

  auto rng = rng_for({opts.seed, 0x746f706fULL});
  Topology t;
  for (std::size_t i = 1; i <= opts.nodes; ++i) t.add_router(RouterId(static_cast<std::uint32_t>(i)));
  // Every link endpoint appears once, so a uniform draw is degree-proportional.
  std::vector<RouterId> ends;
  auto link = [&](RouterId a, RouterId b) {
    t.add_link(a, b, Cost(1));
    ends.push_back(a);
    ends.push_back(b);
  };
  link(RouterId(1), RouterId(2));
  for (std::size_t i = 3; i <= opts.nodes; ++i) link(RouterId(static_cast<std::uint32_t>(i)), ends[pick(rng, ends.size())]);
  while (t.links().size() < opts.links) {
    const RouterId a(static_cast<std::uint32_t>(pick(rng, opts.nodes) + 1));
    const RouterId b = ends[pick(rng, ends.size())];
    if (a == b || t.has_link(a, b)) continue;
    link(a, b);
  }
  return t;
}

void ExperimentPlan::validate() const {
  if (prefixes == 0) throw std::invalid_argument("prefix count must be positive");
  if (anchors == 0) throw std::invalid_argument("anchor count must be positive");
  if (replicas.empty() || scenarios.empty() || protocols.empty() || repetitions == 0) {
    throw std::invalid_argument("plan has no cells to run");
  }
  for (std::size_t r : replicas) {
    if (r == 0 || r > anchors) throw std::invalid_argument("replicas must be between 1 and the anchor count");
  }
  const std::size_t routers = topology ? topology->routers().size() : generator.nodes;
  if (anchors > routers) throw std::invalid_argument("more anchors than routers");
  if (hello_interval == 0) throw std::invalid_argument("hello interval must be positive");
  if (topology && topology->links().empty()) throw std::invalid_argument("topology has no links");
}

const std::vector<std::string>& message_kinds() {
  static const std::vector<std::string> kinds{"UPDATE", "QUERY", "REPLY", "ADJ_LSA", "PREFIX_LSA", "DB_SUMMARY", "HELLO"};
  return kinds;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, const Progress& progress) {
  plan.validate();
  Topology base = plan.topology ? *plan.topology : generate_topology(plan.generator);
  // Prefix placement is replaced per cell; anchors from the file are dropped.
  for (const auto& [p, anchors] : Topology(base).anchors()) {
    for (RouterId a : anchors) base.remove_anchor(p, a);
  }
  const std::vector<RouterId> routers(base.routers().begin(), base.routers().end());

  ExperimentResult result;
  CellContext ctx{plan, result, 50 * base.links().size() * (plan.prefixes + 1)};

  for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
    auto pool_rng = rng_for({plan.seed, rep, 0x616e6368ULL});
    const std::vector<RouterId> pool = choose(pool_rng, routers, plan.anchors);
    for (std::size_t replicas : plan.replicas) {
      Topology topo = base;
      auto place_rng = rng_for({plan.seed, rep, replicas, 0x706c6163ULL});
      for (std::size_t i = 0; i < plan.prefixes; ++i) {
        const PrefixName p(prefix_name(i, plan.prefixes));
        for (RouterId a : choose(place_rng, pool, replicas)) topo.add_anchor(p, a);
      }
      for (Protocol protocol : plan.protocols) {
        if (progress) {
          progress("repetition " + std::to_string(rep + 1) + "/" + std::to_string(plan.repetitions) + " replicas " +
                   std::to_string(replicas) + " " + std::string(to_string(protocol)));
        }
        if (protocol == Protocol::kDnrp) run_protocol<DnrpRouter>(ctx, protocol, topo, pool, replicas, rep);
        else run_protocol<IlsRouter>(ctx, protocol, topo, pool, replicas, rep);
      }
    }
  }
  return result;
}

std::vector<AverageRow> average(const std::vector<MetricsRow>& rows) {
  using Key = std::tuple<std::string, Protocol, std::size_t>;
  std::map<Key, AverageRow> acc;
  for (const MetricsRow& r : rows) {
    AverageRow& a = acc[Key(r.scenario, r.protocol, r.replicas)];
    a.scenario = r.scenario;
    a.protocol = r.protocol;
    a.replicas = r.replicas;
    if (!r.quiescent) {
      ++a.excluded;
      continue;
    }
    ++a.runs;
    a.messages += static_cast<double>(r.messages_total);
    a.updates += static_cast<double>(r.updates_total);
    a.operations += static_cast<double>(r.operations_total);
    a.ticks += static_cast<double>(r.convergence_ticks);
  }
  std::vector<AverageRow> out;
  for (auto& [key, a] : acc) {
    if (a.runs > 0) {
      const auto n = static_cast<double>(a.runs);
      a.messages /= n;
      a.updates /= n;
      a.operations /= n;
      a.ticks /= n;
    }
    out.push_back(a);
  }
  return out;
}

void emit_csv(const std::vector<MetricsRow>& rows, std::ostream& os) {
  if (rows.empty()) throw std::invalid_argument("no rows to write");
  os << "scenario,protocol,replicas_per_prefix,repetition,messages_total";
  for (const std::string& k : message_kinds()) {
    std::string col = "msg_" + k;
    std::transform(col.begin(), col.end(), col.begin(), [](unsigned char c) { return std::tolower(c); });
    os << ',' << col;
  }
  os << ",updates_total,operations_total,convergence_ticks,quiescent\n";
  for (const MetricsRow& r : rows) {
    os << r.scenario << ',' << to_string(r.protocol) << ',' << r.replicas << ',' << r.repetition << ','
       << r.messages_total;
    for (const std::string& k : message_kinds()) {
      auto it = r.messages_by_kind.find(k);
      os << ',' << (it == r.messages_by_kind.end() ? 0 : it->second);
    }
    os << ',' << r.updates_total << ',' << r.operations_total << ',' << r.convergence_ticks << ','
       << (r.quiescent ? 1 : 0) << '\n';
  }
}

void emit_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  emit_csv(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

void emit_averages_csv(const std::vector<AverageRow>& rows, std::ostream& os) {
  os << "scenario,protocol,replicas_per_prefix,runs,excluded,mean_messages,mean_updates,mean_operations,mean_ticks\n";
  os << std::fixed << std::setprecision(2);
  for (const AverageRow& a : rows) {
    os << a.scenario << ',' << to_string(a.protocol) << ',' << a.replicas << ',' << a.runs << ','
       << a.excluded << ',' << a.messages << ',' << a.updates << ',' << a.operations << ',' << a.ticks << '\n';
  }
}

}  // namespace dnrp
