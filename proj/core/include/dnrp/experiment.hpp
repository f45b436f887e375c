#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dnrp/scenario.hpp"
#include "dnrp/types.hpp"
#include "dnrp/verifier.hpp"

namespace dnrp {

enum class ScenarioKind : std::uint8_t { kPrefixAdd, kPrefixDelete, kLinkFail, kLinkRecover };

std::string_view to_string(ScenarioKind s);
std::optional<ScenarioKind> parse_scenario(std::string_view s);

struct GeneratorOptions {
  std::size_t nodes = 154;
  std::size_t links = 184;
  std::uint64_t seed = 1;
};

/// Connected unit-cost topology: a preferential-attachment tree plus extra
/// links whose far end is again drawn in proportion to degree. Router ids
/// are 1..nodes.
Topology generate_topology(const GeneratorOptions& opts);

struct ExperimentPlan {
  std::optional<Topology> topology;  // generated with `generator` when absent
  GeneratorOptions generator;
  std::size_t prefixes = 120;
  std::size_t anchors = 30;
  std::vector<std::size_t> replicas{1, 2, 3, 4, 5, 6};
  std::vector<ScenarioKind> scenarios{ScenarioKind::kPrefixAdd, ScenarioKind::kPrefixDelete, ScenarioKind::kLinkFail,
                                      ScenarioKind::kLinkRecover};
  std::vector<Protocol> protocols{Protocol::kDnrp, Protocol::kIls};
  std::size_t repetitions = 10;
  std::uint64_t seed = 1;
  CheckMode check = CheckMode::kCheckpoints;
  bool hello_accounting = false;
  Tick hello_interval = 5;

  /// Throws std::invalid_argument when the plan cannot be run.
  void validate() const;
};

/// Message kinds reported as CSV columns, in column order.
const std::vector<std::string>& message_kinds();

struct MetricsRow {
  std::string scenario;
  Protocol protocol = Protocol::kDnrp;
  std::size_t replicas = 1;
  std::size_t repetition = 0;
  std::map<std::string, std::uint64_t> messages_by_kind;
  std::uint64_t messages_total = 0;
  std::uint64_t updates_total = 0;
  std::uint64_t operations_total = 0;
  Tick convergence_ticks = 0;
  bool quiescent = true;
  std::size_t violations = 0;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

struct AverageRow {
  std::string scenario;
  Protocol protocol = Protocol::kDnrp;
  std::size_t replicas = 1;
  std::size_t runs = 0;      // quiescent rows averaged
  std::size_t excluded = 0;  // non-quiescent rows
  double messages = 0;
  double updates = 0;
  double operations = 0;
  double ticks = 0;
};

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  std::vector<Violation> violations;
  std::uint64_t cycles = 0;
};

using Progress = std::function<void(const std::string&)>;

/// Runs every (replicas, repetition, protocol, scenario) cell. Event targets
/// are drawn from generators seeded by (seed, repetition, replicas, scenario)
/// so both protocols see the same events.
ExperimentResult run_experiment(const ExperimentPlan& plan, const Progress& progress = {});

/// Means per (scenario, protocol, replicas) over quiescent rows, in plan order.
std::vector<AverageRow> average(const std::vector<MetricsRow>& rows);

/// Header plus one line per row; throws std::invalid_argument for no rows.
void emit_csv(const std::vector<MetricsRow>& rows, std::ostream& os);
/// Throws std::runtime_error on I/O failure.
void emit_csv(const std::vector<MetricsRow>& rows, const std::string& path);
void emit_averages_csv(const std::vector<AverageRow>& rows, std::ostream& os);

}  // namespace dnrp
