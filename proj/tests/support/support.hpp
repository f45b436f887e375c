#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dnrp/scenario.hpp"
#include "dnrp/types.hpp"

namespace dnrp::test {

inline RouterId id(std::uint32_t v) { return RouterId(v); }
inline PrefixName pfx(const std::string& s) { return PrefixName(s); }

UpdateRecord record(const std::string& prefix, UpdateKind kind, Cost distance, std::optional<RouterId> anchor);
RoutingMessage message(std::uint32_t from, std::uint32_t to, std::vector<UpdateRecord> records);

/// Routers 1..n with unit-cost links (i, i+1).
Topology path(std::uint32_t n);
/// Routers 1..n with unit-cost links (i, i+1) and (n, 1).
Topology ring(std::uint32_t n);

/// Floyd-Warshall over the links of a topology. Kept apart from the verifier
/// so tests can compare it against the multi-source oracle.
class AllPairs {
 public:
  explicit AllPairs(const Topology& t);

  Cost at(RouterId a, RouterId b) const;
  Cost nearest(RouterId r, const std::set<RouterId>& anchors) const;
  /// True iff `n` is a neighbor of `r` lying on some shortest path from `r` to the anchors.
  bool on_shortest_path(RouterId r, RouterId n, const std::set<RouterId>& anchors) const;

 private:
  const Topology& topo_;
  std::map<RouterId, std::size_t> index_;
  std::vector<std::vector<Cost>> d_;
};

struct FuzzShape {
  std::uint32_t min_nodes = 8;
  std::uint32_t max_nodes = 20;
  std::uint64_t max_cost = 10;
  std::uint64_t max_delay = 3;
  std::uint32_t max_prefixes = 5;
  std::uint32_t max_anchors = 3;
  std::uint32_t min_events = 5;
  std::uint32_t max_events = 15;
};

/// Random connected topology with anchored prefixes and a valid event script
/// mixing link failures, recoveries, cost changes and prefix additions and
/// deletions. Events may coincide in time and may partition the graph.
ScenarioScript random_script(std::uint64_t seed, Protocol protocol = Protocol::kDnrp, const FuzzShape& shape = {});

}  // namespace dnrp::test
