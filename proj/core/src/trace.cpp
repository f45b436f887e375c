#include "dnrp/trace.hpp"

#include <algorithm>
#include <sstream>

namespace dnrp {

namespace {

const char* type_name(TraceType t) {
  switch (t) {
    case TraceType::kSend:
      return "SEND";
    case TraceType::kRecv:
      return "RECV";
    case TraceType::kDrop:
      return "DROP";
    case TraceType::kState:
      return "STATE";
    case TraceType::kLinkUp:
      return "LINKUP";
    case TraceType::kLinkDown:
      return "LINKDOWN";
    case TraceType::kLinkCost:
      return "LINKCOST";
    case TraceType::kPrefixAdd:
      return "PREFIXADD";
    case TraceType::kPrefixDelete:
      return "PREFIXDEL";
  }
  return "?";
}

}  // namespace

std::string format_entry(const TraceEntry& e) {
  std::ostringstream os;
  os << "TICK " << e.tick << ' ' << type_name(e.type);
  switch (e.type) {
    case TraceType::kSend:
    case TraceType::kRecv:
    case TraceType::kDrop:
      os << ' ' << e.a << ' ' << e.b << ' ' << e.kind << ' ' << e.item << ' ' << e.value;
      break;
    case TraceType::kState:
      os << ' ' << e.a << ' ' << e.transition.prefix << ' ' << e.transition.from << ' ' << e.transition.to << ' '
         << to_string(e.transition.cause);
      break;
    case TraceType::kLinkUp:
    case TraceType::kLinkCost:
      os << ' ' << e.a << ' ' << e.b << ' ' << e.value;
      break;
    case TraceType::kLinkDown:
      os << ' ' << e.a << ' ' << e.b;
      break;
    case TraceType::kPrefixAdd:
    case TraceType::kPrefixDelete:
      os << ' ' << e.a << ' ' << e.item;
      break;
  }
  return os.str();
}

void write_trace(std::ostream& os, const std::vector<TraceEntry>& trace) {
  for (const TraceEntry& e : trace) os << format_entry(e) << '\n';
}

std::string message_kind(const Message& m) {
  if (const auto* r = std::get_if<RoutingMessage>(&m)) {
    auto has = [&](UpdateKind k) {
      return std::any_of(r->records.begin(), r->records.end(), [k](const UpdateRecord& u) { return u.kind == k; });
    };
    if (has(UpdateKind::kQuery)) return "QUERY";
    if (has(UpdateKind::kReply)) return "REPLY";
    return "UPDATE";
  }
  const auto& ls = std::get<LinkStateMessage>(m);
  if (const Lsa* lsa = std::get_if<Lsa>(&ls.body)) return std::string(to_string(lsa->kind));
  return "DB_SUMMARY";
}

std::uint64_t message_items(const Message& m) {
  if (const auto* r = std::get_if<RoutingMessage>(&m)) return r->records.size();
  const auto& ls = std::get<LinkStateMessage>(m);
  return std::holds_alternative<Lsa>(ls.body) ? 1 : 0;
}

void trace_message(std::vector<TraceEntry>& out, TraceType type, Tick tick, std::uint64_t event_index,
                   const Message& m) {
  TraceEntry e;
  e.type = type;
  e.tick = tick;
  e.event_index = event_index;
  e.a = sender_of(m);
  e.b = receiver_of(m);
  if (const auto* r = std::get_if<RoutingMessage>(&m)) {
    for (const UpdateRecord& u : r->records) {
      e.kind = std::string(to_string(u.kind));
      e.item = u.prefix.str();
      e.value = to_string(u.distance);
      out.push_back(e);
    }
    return;
  }
  const auto& ls = std::get<LinkStateMessage>(m);
  if (const Lsa* lsa = std::get_if<Lsa>(&ls.body)) {
    e.kind = std::string(to_string(lsa->kind));
    e.item = std::to_string(lsa->origin.value);
    e.value = std::to_string(lsa->seq);
  } else {
    e.kind = "DB_SUMMARY";
    e.item = "-";
    e.value = std::to_string(std::get<LsdbSummary>(ls.body).entries.size());
  }
  out.push_back(e);
}

}  // namespace dnrp
