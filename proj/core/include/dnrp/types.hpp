#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

namespace dnrp {

/// Opaque router identifier. The numeric order is the tie-break order used by
/// the loop-freedom conditions.
struct RouterId {
  std::uint32_t value = 0;

  constexpr RouterId() = default;
  constexpr explicit RouterId(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(RouterId, RouterId) = default;
};

constexpr bool order_less(RouterId a, RouterId b) { return a.value < b.value; }

std::ostream& operator<<(std::ostream& os, RouterId id);

/// Name prefix. Exact-match token, no hierarchy.
class PrefixName {
 public:
  PrefixName() = default;
  explicit PrefixName(std::string name) : name_(std::move(name)) {}

  const std::string& str() const { return name_; }

  friend auto operator<=>(const PrefixName&, const PrefixName&) = default;

 private:
  std::string name_;
};

std::ostream& operator<<(std::ostream& os, const PrefixName& p);

/// Non-negative path cost with a saturating infinity.
class Cost {
 public:
  using rep = std::uint64_t;

  constexpr Cost() = default;
  constexpr explicit Cost(rep v) : value_(v > kInf ? kInf : v) {}

  static constexpr Cost infinity() { return Cost(kInf); }

  constexpr bool is_infinite() const { return value_ == kInf; }
  constexpr bool is_finite() const { return value_ != kInf; }
  constexpr rep value() const { return value_; }

  friend constexpr auto operator<=>(Cost, Cost) = default;

 private:
  static constexpr rep kInf = std::numeric_limits<rep>::max();
  rep value_ = 0;
};

/// Saturating addition: any infinite operand gives infinity, finite sums never wrap.
constexpr Cost cost_add(Cost a, Cost b) {
  if (a.is_infinite() || b.is_infinite()) return Cost::infinity();
  const Cost::rep room = Cost::infinity().value() - a.value();
  if (b.value() >= room) return Cost::infinity();
  return Cost(a.value() + b.value());
}

constexpr Cost operator+(Cost a, Cost b) { return cost_add(a, b); }

std::ostream& operator<<(std::ostream& os, Cost c);
std::string to_string(Cost c);

// ---------------------------------------------------------------------------
// Routing messages

enum class UpdateKind : std::uint8_t { kUpdate, kQuery, kReply };

std::string_view to_string(UpdateKind k);

struct UpdateRecord {
  PrefixName prefix;
  UpdateKind kind = UpdateKind::kUpdate;
  Cost distance = Cost::infinity();
  std::optional<RouterId> anchor;  // absent iff distance is infinite

  friend bool operator==(const UpdateRecord&, const UpdateRecord&) = default;
};

struct RoutingMessage {
  RouterId from;
  RouterId to;
  std::vector<UpdateRecord> records;  // at most one per prefix

  friend bool operator==(const RoutingMessage&, const RoutingMessage&) = default;
};

// Link-state baseline messages.

enum class LsaKind : std::uint8_t { kAdjacency, kPrefix };

std::string_view to_string(LsaKind k);

struct Lsa {
  RouterId origin;
  std::uint64_t seq = 0;
  LsaKind kind = LsaKind::kAdjacency;
  std::vector<std::pair<RouterId, Cost>> adjacencies;  // kAdjacency payload
  std::vector<PrefixName> prefixes;                    // kPrefix payload, sorted

  friend bool operator==(const Lsa&, const Lsa&) = default;
};

/// Database summary sent when an adjacency comes up: (origin, kind, seq) per
/// stored LSA. The receiver answers with every LSA the summary lacks.
struct LsdbSummary {
  std::vector<std::tuple<RouterId, LsaKind, std::uint64_t>> entries;

  friend bool operator==(const LsdbSummary&, const LsdbSummary&) = default;
};

struct LinkStateMessage {
  RouterId from;
  RouterId to;
  std::variant<Lsa, LsdbSummary> body;

  friend bool operator==(const LinkStateMessage&, const LinkStateMessage&) = default;
};

// ---------------------------------------------------------------------------
// Topology

struct LinkSpec {
  Cost cost{1};
  std::uint64_t delay = 1;  // ticks

  friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

/// Undirected link key with endpoints stored in ascending order.
struct LinkKey {
  RouterId a;
  RouterId b;

  LinkKey() = default;
  LinkKey(RouterId x, RouterId y) : a(x < y ? x : y), b(x < y ? y : x) {}

  friend auto operator<=>(const LinkKey&, const LinkKey&) = default;
};

class TopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Topology {
 public:
  void add_router(RouterId id);
  /// Adds an undirected link; rejects self links, duplicates, unknown routers
  /// and non-positive costs.
  void add_link(RouterId a, RouterId b, Cost cost, std::uint64_t delay = 1);
  void remove_link(RouterId a, RouterId b);
  void set_cost(RouterId a, RouterId b, Cost cost);
  void add_anchor(const PrefixName& p, RouterId r);
  void remove_anchor(const PrefixName& p, RouterId r);

  bool has_router(RouterId id) const { return routers_.contains(id); }
  bool has_link(RouterId a, RouterId b) const { return links_.contains(LinkKey(a, b)); }
  const LinkSpec& link(RouterId a, RouterId b) const;

  const std::set<RouterId>& routers() const { return routers_; }
  const std::map<LinkKey, LinkSpec>& links() const { return links_; }
  const std::map<PrefixName, std::set<RouterId>>& anchors() const { return anchors_; }
  std::set<RouterId> anchors_of(const PrefixName& p) const;

  /// Neighbors of `id` with the link cost.
  std::vector<std::pair<RouterId, Cost>> neighbors(RouterId id) const;

  bool connected() const;

 private:
  std::set<RouterId> routers_;
  std::map<LinkKey, LinkSpec> links_;
  std::map<PrefixName, std::set<RouterId>> anchors_;
};

// ---------------------------------------------------------------------------
// Simulation events

using Tick = std::uint64_t;

struct LinkUp {
  RouterId a, b;
  Cost cost{1};
  std::uint64_t delay = 1;
};
struct LinkDown {
  RouterId a, b;
};
struct LinkCostChange {
  RouterId a, b;
  Cost cost{1};
};
struct PrefixAdd {
  RouterId router;
  PrefixName prefix;
};
struct PrefixDelete {
  RouterId router;
  PrefixName prefix;
};

/// External (scripted) event bodies.
using ExternalEvent = std::variant<LinkUp, LinkDown, LinkCostChange, PrefixAdd, PrefixDelete>;

using Message = std::variant<RoutingMessage, LinkStateMessage>;

struct Deliver {
  Message message;
  std::uint64_t link_epoch = 0;  // incarnation of the link at send time
};

using EventBody = std::variant<LinkUp, LinkDown, LinkCostChange, PrefixAdd, PrefixDelete, Deliver>;

struct SimEvent {
  Tick time = 0;
  std::uint64_t seq = 0;
  EventBody body;
};

/// Heap order: earliest (time, seq) first.
struct SimEventLater {
  bool operator()(const SimEvent& x, const SimEvent& y) const {
    return std::tie(x.time, x.seq) > std::tie(y.time, y.seq);
  }
};

RouterId sender_of(const Message& m);
RouterId receiver_of(const Message& m);

}  // namespace dnrp
