#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "dnrp/types.hpp"

namespace dnrp {

enum class Mode : std::uint8_t { kPassive, kActive };

std::string_view to_string(Mode m);

/// Read-only view of one routing-table entry, engine agnostic.
struct RouteView {
  Cost distance = Cost::infinity();
  Cost feasible_distance = Cost::infinity();
  std::optional<RouterId> successor;
  std::optional<RouterId> anchor;
  std::vector<RouterId> next_hops;                  // ascending
  std::vector<std::pair<RouterId, Cost>> reported;  // neighbor -> last reported distance
  Mode mode = Mode::kPassive;
  int origin = 0;
  std::vector<RouterId> pending_replies;  // ascending
  std::vector<RouterId> pending_queries;  // ascending
  bool local = false;

  Cost reported_by(RouterId n) const;

  friend bool operator==(const RouteView&, const RouteView&) = default;
};

struct RouterSnapshot {
  RouterId router;
  std::map<PrefixName, RouteView> routes;
  std::vector<RouterId> neighbors;  // adjacencies up at the time, ascending
  std::uint64_t operations = 0;

  const RouteView* find(const PrefixName& p) const;

  friend bool operator==(const RouterSnapshot&, const RouterSnapshot&) = default;
};

/// Why an origin state changed. Values mirror the event column of the
/// DNRP state-transition table.
enum class TransitionCause : std::uint8_t {
  kSrcNotSatisfied,            // 0 -> 1
  kQueryFromSuccessor,         // 0 -> 3, 1 -> 4, 2 -> 4
  kSuccessorDistanceIncrease,  // 1 -> 2, 3 -> 4
  kLastReply,                  // 1 -> 0, 3 -> 0 (feasible distance reset)
  kLastReplySrcSatisfied,      // 2 -> 0, 4 -> 0
  kLastReplySrcNotSatisfied,   // 2 -> 1, 4 -> 3
};

std::string_view to_string(TransitionCause c);

struct Transition {
  RouterId router;
  PrefixName prefix;
  int from = 0;
  int to = 0;
  TransitionCause cause = TransitionCause::kSrcNotSatisfied;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// True iff (from, to, cause) is a row of the DNRP state-transition table.
bool is_legal_transition(int from, int to, TransitionCause cause);

}  // namespace dnrp
