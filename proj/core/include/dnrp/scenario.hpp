#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "dnrp/io.hpp"
#include "dnrp/snapshot.hpp"
#include "dnrp/trace.hpp"
#include "dnrp/types.hpp"
#include "dnrp/verifier.hpp"

namespace dnrp {

enum class Protocol : std::uint8_t { kDnrp, kIls };

std::string_view to_string(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view s);

enum class CheckMode : std::uint8_t { kOff, kCheckpoints, kEveryStep };

std::string_view to_string(CheckMode m);
std::optional<CheckMode> parse_check_mode(std::string_view s);

struct ScenarioScript {
  Topology topology;
  Protocol protocol = Protocol::kDnrp;
  std::vector<TimedEvent> events;
  std::uint64_t seed = 0;
  Tick link_delay = 1;
};

struct RunOptions {
  CheckMode check = CheckMode::kCheckpoints;
  bool record_trace = true;
  std::uint64_t event_cap = 0;  // 0: 50 x links x prefixes
};

struct SimulationTrace {
  std::vector<TraceEntry> entries;
  std::vector<RouterSnapshot> final_snapshots;
  Topology final_topology;
  Metrics metrics;
  std::uint64_t operations = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t event_cap = 0;
  bool quiescent = true;
  std::uint64_t cycles = 0;
  std::vector<Violation> violations;
};

/// Delivery cap used to flag non-termination: 50 x |links| x |prefixes|,
/// counting prefixes anchored in the topology or named by an event.
std::uint64_t default_event_cap(const Topology& t, const std::vector<TimedEvent>& events);

/// Brings the topology up at tick 0, injects the scripted events and runs to
/// quiescence. Checks selected by `opts.check` fill `violations`; at
/// quiescence the final state is compared with the oracle for every prefix.
SimulationTrace run_script(const ScenarioScript& script, const RunOptions& opts = {});

}  // namespace dnrp
