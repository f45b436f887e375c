#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "dnrp/snapshot.hpp"
#include "dnrp/types.hpp"

namespace dnrp {

enum class TraceType : std::uint8_t {
  kSend,
  kRecv,
  kDrop,
  kState,
  kLinkUp,
  kLinkDown,
  kLinkCost,
  kPrefixAdd,
  kPrefixDelete,
};

/// One trace line. Message lines carry one record (DNRP) or one LSA (ILS);
/// `kind`, `item` and `value` hold the textual fields of that record.
struct TraceEntry {
  TraceType type = TraceType::kSend;
  Tick tick = 0;
  std::uint64_t event_index = 0;
  RouterId a;  // sender, link endpoint, or router
  RouterId b;  // receiver or other link endpoint
  std::string kind;
  std::string item;
  std::string value;
  Transition transition;  // kState only

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

/// `TICK <t> SEND|RECV|DROP <from> <to> <kind> <prefix> <distance>`, plus
/// STATE, LINKUP, LINKDOWN, LINKCOST, PREFIXADD and PREFIXDEL lines.
std::string format_entry(const TraceEntry& e);
void write_trace(std::ostream& os, const std::vector<TraceEntry>& trace);

struct Metrics {
  std::map<std::string, std::uint64_t> messages_by_kind;
  std::uint64_t messages_total = 0;
  std::uint64_t updates_total = 0;  // records or LSAs carried
  std::uint64_t deliveries = 0;
  std::uint64_t drops = 0;
  std::uint64_t events = 0;
  Tick first_tick = 0;
  Tick last_tick = 0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Kind used for per-message accounting: QUERY beats REPLY beats UPDATE for
/// a batch of records; link-state messages count by LSA kind or DB_SUMMARY.
std::string message_kind(const Message& m);
std::uint64_t message_items(const Message& m);

/// Appends one trace entry per record (or LSA) of `m`.
void trace_message(std::vector<TraceEntry>& out, TraceType type, Tick tick, std::uint64_t event_index,
                   const Message& m);

}  // namespace dnrp
