#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dnrp/snapshot.hpp"
#include "dnrp/trace.hpp"
#include "dnrp/types.hpp"

namespace dnrp {

/// Machine-readable form: `VIOLATION <kind> <event-index> <prefix> <routers...>`.
struct Violation {
  std::string kind;
  std::uint64_t event_index = 0;
  PrefixName prefix;
  std::vector<RouterId> routers;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::string format_violation(const Violation& v);
/// Human-readable one-liner, detail included.
std::string describe(const Violation& v);

struct CycleReport {
  PrefixName prefix;
  std::uint64_t event_index = 0;
  std::vector<RouterId> cycle;  // r0 -> r1 -> ... -> r0, first router not repeated

  Violation to_violation() const;
};

/// Topologically sorts the next-hop graph of `p`; nullopt when acyclic.
std::optional<CycleReport> check_loop_free(const std::vector<RouterSnapshot>& snapshots, const PrefixName& p,
                                           std::uint64_t event_index = 0);

struct OracleEntry {
  Cost distance = Cost::infinity();
  std::set<RouterId> first_hops;       // neighbors on some shortest path
  std::set<RouterId> nearest_anchors;  // anchors at that distance
};

struct OracleResult {
  PrefixName prefix;
  std::map<RouterId, OracleEntry> routers;

  const OracleEntry& at(RouterId r) const { return routers.at(r); }
};

/// Multi-source Dijkstra from the anchors of `p`.
OracleResult oracle(const Topology& topology, const std::set<RouterId>& anchors, const PrefixName& p);
OracleResult oracle(const Topology& topology, const PrefixName& p);

struct DivergenceReport {
  RouterId router;
  PrefixName prefix;
  Cost expected;
  Cost actual;
  std::string reason;

  Violation to_violation(std::uint64_t event_index = 0) const;
};

/// Quiescent-state comparison against the oracle: exact distances, PASSIVE
/// routes with no pending replies, successors on shortest paths, fd <= d.
std::optional<DivergenceReport> check_convergence(const std::vector<RouterSnapshot>& snapshots,
                                                  const OracleResult& expected);

/// Checks every prefix anchored in `topology` or known to any router.
std::vector<DivergenceReport> check_all_converged(const std::vector<RouterSnapshot>& snapshots,
                                                  const Topology& topology);

/// Every next-hop edge (i, n) must satisfy (d_pn, n) < (fd_p, i) lexicographically.
std::optional<Violation> check_ordering(const std::vector<RouterSnapshot>& snapshots, const PrefixName& p,
                                        std::uint64_t event_index = 0);

/// Single-snapshot consistency of a DNRP router: mode/origin agreement,
/// fd <= d while PASSIVE, next hops equal to NSC over the reported
/// distances, successor among next hops while PASSIVE.
std::vector<Violation> check_router(const RouterSnapshot& s, std::uint64_t event_index = 0);

/// Invariants across one event at one router: successor and fd frozen while
/// ACTIVE (the successor may only be dropped when its link goes down), fd grows only when an ACTIVE computation completes or the router
/// has no neighbors left.
std::vector<Violation> check_transition(const RouterSnapshot& before, const RouterSnapshot& after,
                                        std::uint64_t event_index = 0);

/// Signalling audit over a DNRP trace: state transitions legal and
/// consistent, QUERY only without replies outstanding from an earlier event,
/// one REPLY per received QUERY and none unsolicited, no UPDATE while ACTIVE,
/// no unanswered QUERY once PASSIVE, no REPLY still awaited at the end.
std::vector<Violation> audit_flags(const std::vector<TraceEntry>& trace);

/// Per-event checker fed from a simulator observer.
class StepChecker {
 public:
  /// `dnrp_rules` enables the DNRP-specific router, transition and ordering checks.
  explicit StepChecker(bool dnrp_rules) : dnrp_rules_(dnrp_rules) {}

  /// `snapshots` in ascending router order; only `touched` routers are re-examined.
  void observe(const std::vector<RouterSnapshot>& snapshots, const std::vector<RouterId>& touched,
               std::uint64_t event_index);

  const std::vector<Violation>& violations() const { return violations_; }
  std::uint64_t cycles() const { return cycles_; }
  std::uint64_t steps() const { return steps_; }

 private:
  void add(Violation v);

  bool dnrp_rules_;
  std::map<RouterId, RouterSnapshot> previous_;
  std::vector<Violation> violations_;
  std::uint64_t cycles_ = 0;
  std::uint64_t steps_ = 0;
};

}  // namespace dnrp
