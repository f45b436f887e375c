#include "dnrp/figure1.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>

#include "dnrp/dnrp_router.hpp"
#include "dnrp/simulator.hpp"

namespace dnrp::figure1 {

Topology topology() {
  Topology t;
  for (RouterId r : {kA, kZ, kR, kQ, kS, kT, kU}) t.add_router(r);
  const std::pair<RouterId, RouterId> links[] = {
      {kR, kA}, {kR, kT}, {kR, kQ}, {kQ, kS}, {kQ, kT}, {kS, kU}, {kT, kU}, {kU, kZ},
  };
  for (const auto& [x, y] : links) t.add_link(x, y, Cost(1));
  t.add_anchor(kPrefix, kA);
  t.add_anchor(kPrefix, kZ);
  return t;
}

std::vector<TimedEvent> events(Tick at) { return {{at, LinkCostChange{kR, kA, kRaisedCost}}}; }

std::string name_of(RouterId r) {
  static const char* names[] = {"?", "a", "z", "r", "q", "s", "t", "u"};
  return r.value < 8 ? names[r.value] : std::to_string(r.value);
}

namespace {

using Entries = std::vector<TraceEntry>;

std::optional<std::uint64_t> find_state(const Entries& trace, RouterId r, int from, int to) {
  for (const TraceEntry& e : trace) {
    if (e.type == TraceType::kState && e.a == r && e.transition.from == from && e.transition.to == to) {
      return e.event_index;
    }
  }
  return std::nullopt;
}

std::optional<std::uint64_t> find_msg(const Entries& trace, TraceType type, RouterId from, RouterId to,
                                      const std::string& kind, std::uint64_t not_before = 0) {
  for (const TraceEntry& e : trace) {
    if (e.type == type && e.a == from && e.b == to && e.kind == kind && e.event_index >= not_before) {
      return e.event_index;
    }
  }
  return std::nullopt;
}

std::string line_of(const TraceEntry& e) {
  std::ostringstream os;
  os << "t=" << e.tick << " #" << e.event_index << ' ';
  switch (e.type) {
    case TraceType::kSend:
    case TraceType::kRecv:
    case TraceType::kDrop:
      os << (e.type == TraceType::kSend ? "SEND " : e.type == TraceType::kRecv ? "RECV " : "DROP ") << name_of(e.a)
         << "->" << name_of(e.b) << ' ' << e.kind << ' ' << e.value;
      break;
    case TraceType::kState:
      os << "STATE " << name_of(e.a) << ' ' << e.transition.from << "->" << e.transition.to << ' '
         << to_string(e.transition.cause);
      break;
    default:
      os << format_entry(e);
      break;
  }
  return os.str();
}

std::string at_event(std::optional<std::uint64_t> ev) {
  return ev ? "event #" + std::to_string(*ev) : std::string("never");
}

bool before(std::optional<std::uint64_t> x, std::optional<std::uint64_t> y) { return x && y && *x < *y; }

bool not_after(std::optional<std::uint64_t> x, std::optional<std::uint64_t> y) { return x && y && *x <= *y; }

bool same(std::optional<std::uint64_t> x, std::optional<std::uint64_t> y) { return x.has_value() && x == y; }

}  // namespace

bool Result::ok() const {
  return run.violations.empty() &&
         std::all_of(checkpoints.begin(), checkpoints.end(), [](const Checkpoint& c) { return c.passed; });
}

std::string Result::diff() const {
  std::ostringstream os;
  for (const Checkpoint& c : checkpoints) {
    if (c.passed) continue;
    os << "checkpoint '" << c.name << "' failed\n  expected: " << c.expected << "\n  actual:   " << c.actual << '\n';
  }
  for (const Violation& v : run.violations) os << format_violation(v) << '\n';
  os << "observed sequence:\n";
  for (const TraceEntry& e : run.entries) os << "  " << line_of(e) << '\n';
  return os.str();
}

Result replay(const Options& opts) {
  Simulator<DnrpRouter> sim(topology(), SimOptions{false, 0});
  sim.run();
  const std::vector<RouterSnapshot> initial = sim.snapshots();

  sim.set_options(SimOptions{true, 0});
  sim.reset_metrics();
  if (opts.drop_q_reply) {
    sim.set_drop_filter([](const Message& m) {
      const auto* r = std::get_if<RoutingMessage>(&m);
      if (r == nullptr || r->from != kQ || r->to != kR) return false;
      return std::any_of(r->records.begin(), r->records.end(),
                         [](const UpdateRecord& u) { return u.kind == UpdateKind::kReply; });
    });
  }
  const std::uint64_t start_ops = sim.operations();
  for (const auto& [at, ev] : events(sim.now() + 1)) sim.schedule(at, ev);

  StepChecker checker(true);
  typename Simulator<DnrpRouter>::Observer observer;
  if (opts.check == CheckMode::kEveryStep) {
    observer = [&checker](const Simulator<DnrpRouter>& s, const StepInfo& info) {
      checker.observe(s.snapshots(), info.touched, info.event_index);
    };
  }
  const RunResult rr = sim.run(observer);

  Result out;
  SimulationTrace& run = out.run;
  run.entries = sim.trace();
  run.final_snapshots = sim.snapshots();
  run.final_topology = sim.topology();
  run.metrics = sim.metrics();
  run.operations = sim.operations() - start_ops;
  run.deliveries = rr.deliveries;
  run.quiescent = rr.quiescent;
  run.cycles = checker.cycles();
  run.violations = checker.violations();
  if (opts.check != CheckMode::kOff) {
    const std::uint64_t last = sim.event_index();
    if (auto cycle = check_loop_free(run.final_snapshots, kPrefix, last)) {
      ++run.cycles;
      run.violations.push_back(cycle->to_violation());
    }
    for (Violation& v : audit_flags(run.entries)) run.violations.push_back(std::move(v));
  }

  const Entries& tr = run.entries;
  auto add = [&out](std::string name, bool passed, std::string expected, std::string actual) {
    out.checkpoints.push_back(Checkpoint{std::move(name), passed, std::move(expected), std::move(actual)});
  };
  auto route = [&](const std::vector<RouterSnapshot>& snaps, RouterId r) -> const RouteView* {
    for (const RouterSnapshot& s : snaps) {
      if (s.router == r) return s.find(kPrefix);
    }
    return nullptr;
  };

  {
    const RouteView* r0 = route(initial, kR);
    const RouteView* t0 = route(initial, kT);
    const RouteView* q0 = route(initial, kQ);
    const bool ok = r0 && t0 && q0 && r0->distance == Cost(1) && r0->successor == kA && t0->successor == kR &&
                    q0->successor == kR && r0->feasible_distance == Cost(1);
    add("initial routes", ok, "r: d=1 via a, fd=1; q and t use r as successor",
        r0 && t0 && q0 ? "r: d=" + to_string(r0->distance) + " fd=" + to_string(r0->feasible_distance) +
                             ", q successor " + (q0->successor ? name_of(*q0->successor) : "-") + ", t successor " +
                             (t0->successor ? name_of(*t0->successor) : "-")
                       : "routes missing");
  }

  const auto r_active = find_state(tr, kR, 0, 1);
  {
    bool ok = r_active.has_value();
    std::string actual = "r ACTIVE at " + at_event(r_active);
    for (RouterId n : {kA, kQ, kT}) {
      const auto sent = find_msg(tr, TraceType::kSend, kR, n, "QUERY", r_active.value_or(0));
      ok = ok && same(sent, r_active);
      actual += ", QUERY to " + name_of(n) + " at " + at_event(sent);
    }
    add("r goes ACTIVE and queries a, q, t", ok, "r 0->1 and QUERY to a, q, t in the same event", actual);
  }

  const auto q_active = find_state(tr, kQ, 0, 3);
  {
    const auto recv = find_msg(tr, TraceType::kRecv, kR, kQ, "QUERY");
    bool ok = same(recv, q_active) && before(r_active, q_active);
    std::string actual = "q 0->3 at " + at_event(q_active) + ", QUERY from r received at " + at_event(recv);
    for (RouterId n : {kR, kS, kT}) {
      const auto sent = find_msg(tr, TraceType::kSend, kQ, n, "QUERY", q_active.value_or(0));
      ok = ok && same(sent, q_active);
      actual += ", QUERY to " + name_of(n) + " at " + at_event(sent);
    }
    add("q relays the computation", ok, "QUERY from successor r puts q in origin 3; q queries r, s, t", actual);
  }

  const auto r_reply_q = find_msg(tr, TraceType::kSend, kR, kQ, "REPLY");
  {
    const auto recv = find_msg(tr, TraceType::kRecv, kQ, kR, "QUERY");
    const auto r_state_change = std::count_if(tr.begin(), tr.end(), [&](const TraceEntry& e) {
      return e.type == TraceType::kState && e.a == kR && recv && e.event_index == *recv;
    });
    const bool ok = same(r_reply_q, recv) && before(q_active, r_reply_q) && r_state_change == 0;
    add("r replies to q as a non-successor", ok, "r answers q's QUERY in the receiving event without changing state",
        "QUERY from q received at " + at_event(recv) + ", REPLY to q at " + at_event(r_reply_q));
  }

  {
    const auto t_states = std::count_if(tr.begin(), tr.end(),
                                        [](const TraceEntry& e) { return e.type == TraceType::kState && e.a == kT; });
    const auto t_reply = find_msg(tr, TraceType::kSend, kT, kR, "REPLY");
    const RouteView* t1 = route(run.final_snapshots, kT);
    const bool ok = t_states == 0 && t_reply && t1 && t1->successor == kU && t1->distance == Cost(2);
    add("t switches to u without a computation", ok, "t stays PASSIVE, replies to r, ends with successor u at d=2",
        std::to_string(t_states) + " state changes at t, REPLY to r at " + at_event(t_reply) + ", successor " +
            (t1 && t1->successor ? name_of(*t1->successor) : "-"));
  }

  const auto q_passive = find_state(tr, kQ, 3, 0);
  {
    const auto q_reply_r = find_msg(tr, TraceType::kSend, kQ, kR, "REPLY", q_passive.value_or(0));
    bool ok = same(q_reply_r, q_passive) && before(r_reply_q, q_passive);
    std::string actual = "q 3->0 at " + at_event(q_passive) + ", REPLY to r at " + at_event(q_reply_r);
    for (RouterId n : {kR, kS, kT}) {
      const auto got = find_msg(tr, TraceType::kRecv, n, kQ, "REPLY");
      ok = ok && not_after(got, q_passive);
      actual += ", REPLY from " + name_of(n) + " at " + at_event(got);
    }
    const RouteView* q1 = route(run.final_snapshots, kQ);
    ok = ok && q1 && q1->distance == Cost(3) && q1->mode == Mode::kPassive;
    add("q becomes PASSIVE and replies to r", ok, "after REPLYs from r, s, t: q 3->0 with d=3 and REPLY to r", actual);
  }

  const auto r_passive = find_state(tr, kR, 1, 0);
  {
    const auto got = find_msg(tr, TraceType::kRecv, kQ, kR, "REPLY");
    const RouteView* r1 = route(run.final_snapshots, kR);
    const bool ok = same(got, r_passive) && before(q_passive, r_passive) && r1 &&
                    r1->mode == Mode::kPassive && r1->distance == Cost(3) && r1->feasible_distance == Cost(3) &&
                    r1->successor == kT;
    add("r becomes PASSIVE and resets fd", ok, "on q's REPLY: r 1->0, d=3 via t, fd reset from 1 to 3",
        "r 1->0 at " + at_event(r_passive) + ", REPLY from q received at " + at_event(got) +
            (r1 ? ", d=" + to_string(r1->distance) + " fd=" + to_string(r1->feasible_distance) + " successor " +
                      (r1->successor ? name_of(*r1->successor) : "-")
                : ""));
  }

  {
    std::set<RouterId> queriers;
    std::set<RouterId> senders;
    for (const TraceEntry& e : tr) {
      if (e.type != TraceType::kSend) continue;
      senders.insert(e.a);
      if (e.kind == "QUERY") queriers.insert(e.a);
    }
    const bool ok = queriers == std::set<RouterId>{kR, kQ} && !senders.contains(kU) && !senders.contains(kZ);
    std::string actual = "queriers:";
    for (RouterId r : queriers) actual += ' ' + name_of(r);
    actual += "; senders:";
    for (RouterId r : senders) actual += ' ' + name_of(r);
    add("only part of the network is involved", ok, "only r and q query; u and z send nothing", actual);
  }

  {
    const bool ok = rr.quiescent && check_all_converged(run.final_snapshots, run.final_topology).empty();
    add("converged to shortest paths", ok, "every router at its oracle distance", ok ? "yes" : "no");
  }
  return out;
}

}  // namespace dnrp::figure1
