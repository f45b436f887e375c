#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "dnrp/snapshot.hpp"
#include "dnrp/types.hpp"

namespace dnrp {

/// Raised when an event is inconsistent with the router's view: a message
/// from a non-neighbor, a duplicate REPLY, a prefix deletion at a non-anchor.
/// These indicate a simulator or protocol bug, never a recoverable condition.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Distance and anchor last reported by a neighbor for one prefix.
struct NeighborEntry {
  Cost distance = Cost::infinity();
  std::optional<RouterId> anchor;
};

/// Per-neighbor signalling state for one prefix.
struct NeighborFlags {
  bool update = false;                   // a record is owed to this neighbor in the next flush
  UpdateKind kind = UpdateKind::kUpdate;  // type of that record
  bool pending_reply = false;            // we queried it and wait for its REPLY
  bool pending_query = false;            // it queried us and waits for our REPLY
  bool owed_update = false;              // adjacency came up while ACTIVE; send state once PASSIVE
};

struct RouteEntry {
  PrefixName prefix;
  Cost distance = Cost::infinity();
  Cost feasible_distance = Cost::infinity();
  std::optional<RouterId> successor;
  std::optional<RouterId> anchor;
  Mode mode = Mode::kPassive;
  int origin = 0;
  std::map<RouterId, NeighborFlags> flags;
  std::set<RouterId> valid_next_hops;
};

struct Candidate {
  std::optional<RouterId> neighbor;
  Cost distance = Cost::infinity();

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// One router running the diffusive name-based routing protocol.
///
/// Every entry point processes a single event to completion and returns the
/// routing messages it produced, at most one record per prefix per message.
/// A message for a neighbor may be preceded by a second one when a REPLY has
/// to reach the neighbor before a QUERY for the same prefix.
class DnrpRouter {
 public:
  using message_type = RoutingMessage;

  explicit DnrpRouter(RouterId me) : me_(me) {}

  RouterId id() const { return me_; }

  std::vector<RoutingMessage> on_link_up(RouterId neighbor, Cost cost);
  std::vector<RoutingMessage> on_link_down(RouterId neighbor);
  std::vector<RoutingMessage> on_link_cost(RouterId neighbor, Cost cost);
  std::vector<RoutingMessage> on_prefix_add(const PrefixName& p);
  std::vector<RoutingMessage> on_prefix_delete(const PrefixName& p);
  std::vector<RoutingMessage> on_message(const RoutingMessage& m);

  // Loop-freedom conditions, evaluated against the current tables.

  /// Neighbor minimizing reported distance plus link cost, ties to the
  /// smaller id. Absent iff every neighbor reports infinity.
  Candidate best_candidate(const PrefixName& p) const;
  /// Source Router Condition for neighbor `n`.
  bool src_holds(const PrefixName& p, RouterId n) const;
  /// Next-hop Selection Condition applied to every neighbor; empty while the
  /// feasible distance is infinite.
  std::set<RouterId> nsc_next_hops(const PrefixName& p) const;

  const RouteEntry* route(const PrefixName& p) const;
  const std::map<PrefixName, RouteEntry>& routes() const { return routes_; }
  const std::map<RouterId, Cost>& neighbors() const { return neighbors_; }
  const std::set<PrefixName>& local_prefixes() const { return local_; }
  NeighborEntry reported(const PrefixName& p, RouterId n) const;

  RouterSnapshot snapshot() const;
  std::uint64_t operations() const { return ops_; }
  /// Origin-state changes since the last call.
  std::vector<Transition> take_transitions();

 private:
  struct Trigger {
    RouterId from;
    UpdateKind kind;
  };

  RouteEntry& entry(const PrefixName& p);
  Cost reported_distance(const PrefixName& p, RouterId n) const;
  Cost through_successor(const RouteEntry& r) const;
  bool feasible(const RouteEntry& r, RouterId n) const;
  Candidate select_best(const PrefixName& p);

  void handle_passive(RouteEntry& r, std::optional<Trigger> trigger);
  void handle_active(RouteEntry& r, RouterId from, UpdateKind kind, Cost before);
  void on_successor_increase(RouteEntry& r);
  void on_last_reply(RouteEntry& r);
  void update_route(RouteEntry& r);
  void start_query(RouteEntry& r);
  bool has_pending_replies(RouteEntry& r);
  void recompute_next_hops(RouteEntry& r);

  void set_origin(RouteEntry& r, int to, TransitionCause cause);
  void flag(RouteEntry& r, RouterId n, UpdateKind kind);
  void flag_all(RouteEntry& r, UpdateKind kind);
  void reply_now(const RouteEntry& r, RouterId n);
  UpdateRecord make_record(const RouteEntry& r, UpdateKind kind) const;
  std::vector<RoutingMessage> flush();

  RouterId me_;
  std::map<RouterId, Cost> neighbors_;
  std::map<PrefixName, std::map<RouterId, NeighborEntry>> neighbor_table_;
  std::map<PrefixName, RouteEntry> routes_;
  std::set<PrefixName> local_;
  std::uint64_t ops_ = 0;

  std::set<PrefixName> touched_;
  std::map<RouterId, std::vector<UpdateRecord>> early_;
  std::vector<Transition> transitions_;
};

}  // namespace dnrp
