#include "dnrp/snapshot.hpp"

#include <algorithm>

namespace dnrp {

std::string_view to_string(Mode m) { return m == Mode::kPassive ? "PASSIVE" : "ACTIVE"; }

std::string_view to_string(TransitionCause c) {
  switch (c) {
    case TransitionCause::kSrcNotSatisfied:
      return "src-not-satisfied";
    case TransitionCause::kQueryFromSuccessor:
      return "query-from-successor";
    case TransitionCause::kSuccessorDistanceIncrease:
      return "successor-distance-increase";
    case TransitionCause::kLastReply:
      return "last-reply";
    case TransitionCause::kLastReplySrcSatisfied:
      return "last-reply-src-satisfied";
    case TransitionCause::kLastReplySrcNotSatisfied:
      return "last-reply-src-not-satisfied";
  }
  return "?";
}

Cost RouteView::reported_by(RouterId n) const {
  auto it = std::lower_bound(reported.begin(), reported.end(), n,
                             [](const auto& e, RouterId id) { return e.first < id; });
  return it != reported.end() && it->first == n ? it->second : Cost::infinity();
}

const RouteView* RouterSnapshot::find(const PrefixName& p) const {
  auto it = routes.find(p);
  return it == routes.end() ? nullptr : &it->second;
}

bool is_legal_transition(int from, int to, TransitionCause cause) {
  using C = TransitionCause;
  struct Row {
    int from, to;
    C cause;
  };
  static constexpr Row kTable[] = {
      {0, 1, C::kSrcNotSatisfied},
      {0, 3, C::kQueryFromSuccessor},
      {1, 0, C::kLastReply},
      {1, 2, C::kSuccessorDistanceIncrease},
      {1, 4, C::kQueryFromSuccessor},
      {2, 0, C::kLastReplySrcSatisfied},
      {2, 1, C::kLastReplySrcNotSatisfied},
      {2, 4, C::kQueryFromSuccessor},
      {3, 0, C::kLastReply},
      {3, 4, C::kSuccessorDistanceIncrease},
      {4, 0, C::kLastReplySrcSatisfied},
      {4, 3, C::kLastReplySrcNotSatisfied},
  };
  return std::any_of(std::begin(kTable), std::end(kTable),
                     [&](const Row& r) { return r.from == from && r.to == to && r.cause == cause; });
}

}  // namespace dnrp
