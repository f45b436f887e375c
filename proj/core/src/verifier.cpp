#include "dnrp/verifier.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <sstream>

namespace dnrp {

namespace {

constexpr std::size_t kMaxStoredViolations = 100;

bool nsc(Cost reported, Cost fd, RouterId n, RouterId me) {
  return reported.is_finite() && (reported < fd || (reported == fd && order_less(n, me)));
}

Violation make(std::string kind, std::uint64_t event, const PrefixName& p, std::vector<RouterId> routers,
               std::string detail) {
  return Violation{std::move(kind), event, p, std::move(routers), std::move(detail)};
}

}  // namespace

std::string format_violation(const Violation& v) {
  std::ostringstream os;
  os << "VIOLATION " << v.kind << ' ' << v.event_index << ' ' << v.prefix;
  for (RouterId r : v.routers) os << ' ' << r;
  return os.str();
}

std::string describe(const Violation& v) {
  std::ostringstream os;
  os << v.kind << " at event " << v.event_index << " for prefix " << v.prefix;
  if (!v.routers.empty()) {
    os << " routers";
    for (RouterId r : v.routers) os << ' ' << r;
  }
  if (!v.detail.empty()) os << ": " << v.detail;
  return os.str();
}

// ---------------------------------------------------------------------------
// Loop freedom

Violation CycleReport::to_violation() const {
  return make("routing-loop", event_index, prefix, cycle, "next-hop graph contains a cycle");
}

std::optional<CycleReport> check_loop_free(const std::vector<RouterSnapshot>& snapshots, const PrefixName& p,
                                           std::uint64_t event_index) {
  std::map<RouterId, std::vector<RouterId>> edges;
  std::map<RouterId, std::size_t> indegree;
  for (const RouterSnapshot& s : snapshots) {
    indegree.try_emplace(s.router, 0);
    const RouteView* v = s.find(p);
    if (v == nullptr) continue;
    for (RouterId n : v->next_hops) {
      edges[s.router].push_back(n);
      ++indegree[n];
    }
  }

  std::deque<RouterId> ready;
  for (const auto& [r, deg] : indegree) {
    if (deg == 0) ready.push_back(r);
  }
  std::size_t removed = 0;
  while (!ready.empty()) {
    const RouterId r = ready.front();
    ready.pop_front();
    ++removed;
    for (RouterId n : edges[r]) {
      if (--indegree[n] == 0) ready.push_back(n);
    }
  }
  if (removed == indegree.size()) return std::nullopt;

  // Every leftover node keeps a leftover predecessor, so walking
  // predecessors must revisit a node.
  std::map<RouterId, std::vector<RouterId>> preds;
  for (const auto& [r, out] : edges) {
    for (RouterId n : out) preds[n].push_back(r);
  }
  RouterId cur;
  for (const auto& [r, deg] : indegree) {
    if (deg > 0) {
      cur = r;
      break;
    }
  }
  std::vector<RouterId> path;
  std::map<RouterId, std::size_t> position;
  while (!position.contains(cur)) {
    position[cur] = path.size();
    path.push_back(cur);
    for (RouterId r : preds[cur]) {
      if (indegree[r] > 0) {
        cur = r;
        break;
      }
    }
  }
  CycleReport report{p, event_index, {}};
  report.cycle.assign(path.begin() + static_cast<std::ptrdiff_t>(position[cur]), path.end());
  std::reverse(report.cycle.begin(), report.cycle.end());
  return report;
}

// ---------------------------------------------------------------------------
// Oracle

OracleResult oracle(const Topology& topology, const std::set<RouterId>& anchors, const PrefixName& p) {
  OracleResult result{p, {}};
  std::map<RouterId, std::vector<std::pair<RouterId, Cost>>> adj;
  for (const auto& [key, spec] : topology.links()) {
    adj[key.a].emplace_back(key.b, spec.cost);
    adj[key.b].emplace_back(key.a, spec.cost);
  }
  for (RouterId r : topology.routers()) result.routers[r];

  using Item = std::pair<Cost, RouterId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (RouterId a : anchors) {
    if (!result.routers.contains(a)) continue;
    result.routers[a].distance = Cost(0);
    heap.emplace(Cost(0), a);
  }
  std::vector<RouterId> order;
  std::set<RouterId> done;
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (!done.insert(u).second) continue;
    order.push_back(u);
    for (const auto& [v, c] : adj[u]) {
      OracleEntry& e = result.routers[v];
      if (d + c < e.distance) {
        e.distance = d + c;
        heap.emplace(e.distance, v);
      }
    }
  }

  // Settled order is non-decreasing in distance, so first hops are final
  // before anyone downstream reads their anchor sets.
  for (RouterId u : order) {
    OracleEntry& e = result.routers[u];
    if (anchors.contains(u)) {
      e.nearest_anchors = {u};
      continue;
    }
    for (const auto& [v, c] : adj[u]) {
      const OracleEntry& ev = result.routers[v];
      if (ev.distance.is_finite() && ev.distance + c == e.distance) {
        e.first_hops.insert(v);
        e.nearest_anchors.insert(ev.nearest_anchors.begin(), ev.nearest_anchors.end());
      }
    }
  }
  return result;
}

OracleResult oracle(const Topology& topology, const PrefixName& p) { return oracle(topology, topology.anchors_of(p), p); }

// ---------------------------------------------------------------------------
// Convergence

Violation DivergenceReport::to_violation(std::uint64_t event_index) const {
  return make("divergence", event_index, prefix, {router},
              reason + " (expected " + to_string(expected) + ", actual " + to_string(actual) + ")");
}

std::optional<DivergenceReport> check_convergence(const std::vector<RouterSnapshot>& snapshots,
                                                  const OracleResult& expected) {
  for (const RouterSnapshot& s : snapshots) {
    auto it = expected.routers.find(s.router);
    if (it == expected.routers.end()) continue;
    const OracleEntry& want = it->second;
    const RouteView* v = s.find(expected.prefix);
    const Cost actual = v ? v->distance : Cost::infinity();
    auto report = [&](std::string reason) {
      return DivergenceReport{s.router, expected.prefix, want.distance, actual, std::move(reason)};
    };
    if (v != nullptr && (v->mode != Mode::kPassive || v->origin != 0)) return report("route still ACTIVE");
    if (v != nullptr && !v->pending_replies.empty()) return report("replies still pending");
    if (actual != want.distance) return report("distance differs from oracle");
    if (v == nullptr) continue;
    if (v->feasible_distance > v->distance && v->distance.is_finite()) return report("feasible distance above distance");
    if (actual.is_finite() && actual != Cost(0)) {
      if (!v->successor || !want.first_hops.contains(*v->successor)) return report("successor not on a shortest path");
    }
  }
  return std::nullopt;
}

std::vector<DivergenceReport> check_all_converged(const std::vector<RouterSnapshot>& snapshots,
                                                  const Topology& topology) {
  std::set<PrefixName> prefixes;
  for (const auto& [p, anchors] : topology.anchors()) prefixes.insert(p);
  for (const RouterSnapshot& s : snapshots) {
    for (const auto& [p, v] : s.routes) prefixes.insert(p);
  }
  std::vector<DivergenceReport> out;
  for (const PrefixName& p : prefixes) {
    if (auto d = check_convergence(snapshots, oracle(topology, p))) out.push_back(*d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Snapshot-level DNRP invariants

std::optional<Violation> check_ordering(const std::vector<RouterSnapshot>& snapshots, const PrefixName& p,
                                        std::uint64_t event_index) {
  for (const RouterSnapshot& s : snapshots) {
    const RouteView* v = s.find(p);
    if (v == nullptr) continue;
    for (RouterId n : v->next_hops) {
      const Cost d = v->reported_by(n);
      const bool below = d < v->feasible_distance || (d == v->feasible_distance && order_less(n, s.router));
      if (!below) {
        return make("ordering", event_index, p, {s.router, n},
                    "reported " + to_string(d) + " not below fd " + to_string(v->feasible_distance));
      }
    }
  }
  return std::nullopt;
}

std::vector<Violation> check_router(const RouterSnapshot& s, std::uint64_t event_index) {
  std::vector<Violation> out;
  for (const auto& [p, v] : s.routes) {
    const bool passive = v.mode == Mode::kPassive;
    if (passive != (v.origin == 0)) out.push_back(make("mode-origin", event_index, p, {s.router}, "mode and origin disagree"));
    if (v.origin < 0 || v.origin > 4) out.push_back(make("origin-range", event_index, p, {s.router}, ""));
    if (passive && v.feasible_distance > v.distance) {
      out.push_back(make("fd-above-distance", event_index, p, {s.router}, "PASSIVE route with fd > d"));
    }
    if (passive && !v.pending_replies.empty()) {
      out.push_back(make("pending-while-passive", event_index, p, {s.router}, "PASSIVE route awaiting replies"));
    }
    if (v.local && passive && (v.distance != Cost(0) || v.feasible_distance != Cost(0) || v.anchor != s.router)) {
      out.push_back(make("local-route", event_index, p, {s.router}, "local prefix without d = fd = 0"));
    }
    if (v.distance.is_finite() != v.anchor.has_value()) {
      out.push_back(make("anchor-presence", event_index, p, {s.router}, "anchor must be present iff distance finite"));
    }

    std::vector<RouterId> expected;
    if (v.feasible_distance.is_finite()) {
      for (const auto& [n, d] : v.reported) {
        if (nsc(d, v.feasible_distance, n, s.router)) expected.push_back(n);
      }
    }
    if (expected != v.next_hops) {
      out.push_back(make("next-hops-not-nsc", event_index, p, {s.router}, "stored next hops differ from NSC"));
    }
    if (passive && v.successor && v.distance.is_finite() && !v.local &&
        !std::binary_search(v.next_hops.begin(), v.next_hops.end(), *v.successor)) {
      out.push_back(make("successor-not-next-hop", event_index, p, {s.router, *v.successor}, ""));
    }
  }
  return out;
}

std::vector<Violation> check_transition(const RouterSnapshot& before, const RouterSnapshot& after,
                                        std::uint64_t event_index) {
  std::vector<Violation> out;
  for (const auto& [p, now] : after.routes) {
    const RouteView* was = before.find(p);
    if (was == nullptr) continue;
    if (was->mode == Mode::kActive && now.mode == Mode::kActive) {
      const bool dropped = was->successor && !now.successor &&
                           !std::binary_search(after.neighbors.begin(), after.neighbors.end(), *was->successor);
      if (was->successor != now.successor && !dropped) {
        out.push_back(make("successor-changed-while-active", event_index, p, {after.router}, ""));
      }
      if (was->feasible_distance != now.feasible_distance) {
        out.push_back(make("fd-changed-while-active", event_index, p, {after.router}, ""));
      }
    }
    // An isolated router finishes its computation within the event that isolated it.
    const bool completed = (was->mode == Mode::kActive && now.mode == Mode::kPassive) ||
                           (now.mode == Mode::kPassive && after.neighbors.empty());
    if (now.feasible_distance > was->feasible_distance && !completed) {
      out.push_back(make("fd-increase", event_index, p, {after.router},
                         to_string(was->feasible_distance) + " -> " + to_string(now.feasible_distance)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trace audit

std::vector<Violation> audit_flags(const std::vector<TraceEntry>& trace) {
  struct PrefixState {
    int origin = 0;
    std::map<RouterId, std::uint64_t> awaiting;  // queried neighbor -> event index of the QUERY
    std::map<RouterId, int> unanswered;          // querier -> QUERYs not yet replied to
  };
  std::map<RouterId, std::map<std::string, PrefixState>> state;
  std::vector<Violation> out;

  auto at = [&](RouterId r, const std::string& p) -> PrefixState& { return state[r][p]; };
  auto flag = [&](const char* kind, const TraceEntry& e, std::vector<RouterId> routers, std::string detail) {
    out.push_back(make(kind, e.event_index, PrefixName(e.item), std::move(routers), std::move(detail)));
  };
  auto close_event = [&](std::uint64_t event, const std::set<std::pair<RouterId, std::string>>& touched) {
    for (const auto& [r, p] : touched) {
      const PrefixState& s = at(r, p);
      if (s.origin != 0) continue;
      for (const auto& [n, count] : s.unanswered) {
        if (count > 0) out.push_back(make("passive-with-unanswered-query", event, PrefixName(p), {r, n}, ""));
      }
    }
  };

  std::set<std::pair<RouterId, std::string>> touched;
  std::uint64_t current = trace.empty() ? 0 : trace.front().event_index;
  for (const TraceEntry& e : trace) {
    if (e.event_index != current) {
      close_event(current, touched);
      touched.clear();
      current = e.event_index;
    }
    switch (e.type) {
      case TraceType::kLinkDown:
        for (auto [x, y] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
          for (auto& [p, s] : state[x]) {
            s.awaiting.erase(y);
            s.unanswered.erase(y);
          }
        }
        break;
      case TraceType::kRecv: {
        PrefixState& s = at(e.b, e.item);
        touched.emplace(e.b, e.item);
        if (e.kind == "QUERY") {
          ++s.unanswered[e.a];
        } else if (e.kind == "REPLY") {
          if (s.awaiting.erase(e.a) == 0) flag("unsolicited-reply-received", e, {e.b, e.a}, "");
        }
        break;
      }
      case TraceType::kState: {
        PrefixState& s = at(e.a, e.item);
        touched.emplace(e.a, e.item);
        const Transition& t = e.transition;
        if (t.from != s.origin) {
          flag("state-mismatch", e, {e.a}, "logged from " + std::to_string(t.from) + ", tracked " + std::to_string(s.origin));
        }
        if (!is_legal_transition(t.from, t.to, t.cause)) {
          flag("illegal-transition", e, {e.a},
               std::to_string(t.from) + " -> " + std::to_string(t.to) + " on " + std::string(to_string(t.cause)));
        }
        s.origin = t.to;
        break;
      }
      case TraceType::kSend: {
        PrefixState& s = at(e.a, e.item);
        touched.emplace(e.a, e.item);
        if (e.kind == "QUERY") {
          if (s.origin == 0) flag("query-while-passive", e, {e.a, e.b}, "");
          const bool stale = std::any_of(s.awaiting.begin(), s.awaiting.end(),
                                         [&](const auto& q) { return q.second < e.event_index; });
          if (stale) flag("query-with-pending-replies", e, {e.a, e.b}, "");
          s.awaiting[e.b] = e.event_index;
        } else if (e.kind == "REPLY") {
          int& count = s.unanswered[e.b];
          if (count == 0) flag("reply-without-query", e, {e.a, e.b}, "REPLY with no unanswered QUERY");
          else --count;
        } else if (e.kind == "UPDATE") {
          if (s.origin != 0) flag("update-while-active", e, {e.a, e.b}, "");
        }
        break;
      }
      default:
        break;
    }
  }
  close_event(current, touched);

  for (const auto& [r, prefixes] : state) {
    for (const auto& [p, s] : prefixes) {
      for (const auto& [n, event] : s.awaiting) {
        out.push_back(make("reply-never-received", event, PrefixName(p), {r, n}, ""));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

void StepChecker::add(Violation v) {
  if (violations_.size() < kMaxStoredViolations) violations_.push_back(std::move(v));
}

void StepChecker::observe(const std::vector<RouterSnapshot>& snapshots, const std::vector<RouterId>& touched,
                          std::uint64_t event_index) {
  ++steps_;
  std::set<PrefixName> prefixes;
  for (RouterId r : touched) {
    auto it = std::lower_bound(snapshots.begin(), snapshots.end(), r,
                               [](const RouterSnapshot& s, RouterId id) { return s.router < id; });
    if (it == snapshots.end() || it->router != r) continue;
    const RouterSnapshot& now = *it;
    for (const auto& [p, v] : now.routes) prefixes.insert(p);
    if (dnrp_rules_) {
      for (Violation& v : check_router(now, event_index)) add(std::move(v));
      if (auto prev = previous_.find(r); prev != previous_.end()) {
        for (Violation& v : check_transition(prev->second, now, event_index)) add(std::move(v));
      }
    }
    previous_[r] = now;
  }
  for (const PrefixName& p : prefixes) {
    if (auto cycle = check_loop_free(snapshots, p, event_index)) {
      ++cycles_;
      add(cycle->to_violation());
    }
    if (dnrp_rules_) {
      if (auto v = check_ordering(snapshots, p, event_index)) add(std::move(*v));
    }
  }
}

}  // namespace dnrp
