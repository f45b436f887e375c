#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "dnrp/snapshot.hpp"
#include "dnrp/types.hpp"

namespace dnrp {

struct RankedHop {
  RouterId neighbor;
  Cost distance;  // link cost plus the neighbor's distance to its nearest anchor

  friend bool operator==(const RankedHop&, const RankedHop&) = default;
};

struct IlsRoute {
  Cost distance = Cost::infinity();
  std::optional<RouterId> anchor;
  std::vector<RankedHop> ranking;  // ascending (distance, id), finite entries only
  bool local = false;
};

using LsaKey = std::pair<RouterId, LsaKind>;

/// Idealized link-state router: adjacency and prefix LSAs, flooding with
/// sequence numbers, one Dijkstra per neighbor to rank next hops.
class IlsRouter {
 public:
  using message_type = LinkStateMessage;

  explicit IlsRouter(RouterId me) : me_(me) {}

  RouterId id() const { return me_; }

  std::vector<LinkStateMessage> on_link_up(RouterId neighbor, Cost cost);
  std::vector<LinkStateMessage> on_link_down(RouterId neighbor);
  std::vector<LinkStateMessage> on_link_cost(RouterId neighbor, Cost cost);
  std::vector<LinkStateMessage> on_prefix_add(const PrefixName& p);
  std::vector<LinkStateMessage> on_prefix_delete(const PrefixName& p);
  std::vector<LinkStateMessage> on_message(const LinkStateMessage& m);

  /// Bumps the sequence number of our own LSA of `kind` and sends it to every neighbor.
  std::vector<LinkStateMessage> originate_lsa(LsaKind kind);
  /// Stores `lsa` if newer than the stored copy and forwards it to every
  /// neighbor except `from`. Older or equal copies are dropped.
  std::vector<LinkStateMessage> flood(const Lsa& lsa, RouterId from);
  /// Runs one Dijkstra per neighbor over the two-way links of the database
  /// and ranks neighbors per prefix.
  const std::map<PrefixName, IlsRoute>& recompute_routes();

  /// While held, database changes mark the routes stale without running
  /// Dijkstra. Releasing recomputes once if anything changed. Flooding does
  /// not depend on routes, so a held run ends in the same state.
  void hold_routes(bool hold);

  const std::map<LsaKey, Lsa>& lsdb() const { return db_; }
  const std::map<PrefixName, IlsRoute>& routes() const { return routes_; }
  const std::map<RouterId, Cost>& neighbors() const { return neighbors_; }

  RouterSnapshot snapshot() const;
  std::uint64_t operations() const { return ops_; }
  std::vector<Transition> take_transitions() { return {}; }

 private:
  void send(std::vector<LinkStateMessage>& out, RouterId to, const Lsa& lsa);
  std::vector<LinkStateMessage> finish(std::vector<LinkStateMessage> out);

  RouterId me_;
  std::map<RouterId, Cost> neighbors_;
  std::set<PrefixName> local_;
  std::map<LsaKey, Lsa> db_;
  // Highest seq each neighbor is known to hold, per LSA, for the current adjacency.
  std::map<RouterId, std::map<LsaKey, std::uint64_t>> known_;
  std::map<PrefixName, IlsRoute> routes_;
  bool dirty_ = false;
  bool held_ = false;
  std::uint64_t ops_ = 0;
};

}  // namespace dnrp
