#pragma once

#include <string>
#include <vector>

#include "dnrp/io.hpp"
#include "dnrp/scenario.hpp"
#include "dnrp/types.hpp"

namespace dnrp::figure1 {

// Router names of the example network, numbered so that the id order
// matches the tie-breaks of the narrated run.
inline constexpr RouterId kA{1};
inline constexpr RouterId kZ{2};
inline constexpr RouterId kR{3};
inline constexpr RouterId kQ{4};
inline constexpr RouterId kS{5};
inline constexpr RouterId kT{6};
inline constexpr RouterId kU{7};

inline const PrefixName kPrefix{"p"};

/// New cost of link (r, a); large enough that no neighbor of r is feasible.
inline constexpr Cost kRaisedCost{10};

/// Unit-cost network with anchors a and z for prefix `p`.
Topology topology();
/// Cost change on (r, a) at `at`.
std::vector<TimedEvent> events(Tick at);

std::string name_of(RouterId r);

struct Checkpoint {
  std::string name;
  bool passed = false;
  std::string expected;
  std::string actual;
};

struct Options {
  /// Loses the REPLY q sends to r, for a negative control.
  bool drop_q_reply = false;
  CheckMode check = CheckMode::kEveryStep;
};

struct Result {
  SimulationTrace run;               // trace of the cost change only
  std::vector<Checkpoint> checkpoints;

  bool ok() const;
  /// Expected versus actual causality, one block per failed checkpoint,
  /// followed by the observed message sequence.
  std::string diff() const;
};

/// Converges the network, raises the cost of (r, a) and checks the narrated
/// sequence: r goes ACTIVE and queries, q relays the computation, r answers
/// q as a non-successor, q returns to PASSIVE and replies, r returns to
/// PASSIVE with a reset feasible distance.
Result replay(const Options& opts = {});

}  // namespace dnrp::figure1
