#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "dnrp/dnrp_router.hpp"
#include "dnrp/figure1.hpp"
#include "dnrp/scenario.hpp"
#include "dnrp/verifier.hpp"
#include "support.hpp"

using namespace dnrp;
using dnrp::test::id;
using dnrp::test::message;
using dnrp::test::pfx;
using dnrp::test::record;

namespace {

const UpdateKind kU = UpdateKind::kUpdate;
const UpdateKind kQ = UpdateKind::kQuery;
const UpdateKind kR = UpdateKind::kReply;

std::vector<RoutingMessage> tell(DnrpRouter& r, std::uint32_t from, UpdateKind kind, Cost d,
                                 std::uint32_t anchor = 99) {
  std::optional<RouterId> a;
  if (d.is_finite()) a = id(anchor);
  return r.on_message(message(from, r.id().value, {record("p", kind, d, a)}));
}

/// (neighbor, kind, distance) of every record in `out`, in emission order.
std::vector<std::tuple<std::uint32_t, UpdateKind, Cost>> sent(const std::vector<RoutingMessage>& out) {
  std::vector<std::tuple<std::uint32_t, UpdateKind, Cost>> v;
  for (const RoutingMessage& m : out) {
    for (const UpdateRecord& rec : m.records) v.emplace_back(m.to.value, rec.kind, rec.distance);
  }
  return v;
}

std::vector<std::pair<int, int>> origins(DnrpRouter& r) {
  std::vector<std::pair<int, int>> v;
  for (const Transition& t : r.take_transitions()) v.emplace_back(t.from, t.to);
  return v;
}

using Sent = std::vector<std::tuple<std::uint32_t, UpdateKind, Cost>>;

}  // namespace

TEST(BestCandidate, MinimumSumOverNeighbors) {
  DnrpRouter r(id(5));
  r.on_link_up(id(2), Cost(1));
  r.on_link_up(id(4), Cost(1));
  tell(r, 2, kU, Cost(1));
  tell(r, 4, kU, Cost(3));
  // b: 1 + 1 = 2, d: 3 + 1 = 4
  EXPECT_EQ(r.best_candidate(pfx("p")), (Candidate{id(2), Cost(2)}));
}

TEST(BestCandidate, AllInfinite) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  r.on_link_up(id(3), Cost(1));
  EXPECT_EQ(r.best_candidate(pfx("p")), (Candidate{std::nullopt, Cost::infinity()}));
}

TEST(BestCandidate, TieGoesToSmallerId) {
  DnrpRouter r(id(1));
  r.on_link_up(id(9), Cost(1));
  r.on_link_up(id(4), Cost(1));
  tell(r, 9, kU, Cost(2));
  tell(r, 4, kU, Cost(2));
  EXPECT_EQ(r.best_candidate(pfx("p")), (Candidate{id(4), Cost(3)}));
}

TEST(SrcHolds, Examples) {
  DnrpRouter r(id(5));
  r.on_link_up(id(3), Cost(1));
  r.on_link_up(id(2), Cost(1));
  tell(r, 3, kU, Cost(1));
  ASSERT_EQ(r.route(pfx("p"))->feasible_distance, Cost(2));
  tell(r, 2, kU, Cost(2));
  // 3: 1 < fd and 1 + 1 is the minimum.
  EXPECT_TRUE(r.src_holds(pfx("p"), id(3)));
  // 2: ties fd with a smaller id but 2 + 1 is not the minimum.
  EXPECT_FALSE(r.src_holds(pfx("p"), id(2)));

  DnrpRouter low(id(1));
  low.on_link_up(id(3), Cost(1));
  low.on_link_up(id(7), Cost(1));
  tell(low, 3, kU, Cost(1));
  tell(low, 7, kU, Cost(2));
  EXPECT_FALSE(low.src_holds(pfx("p"), id(7)));
  EXPECT_FALSE(low.src_holds(pfx("p"), id(9)));

  DnrpRouter none(id(1));
  none.on_link_up(id(2), Cost(1));
  EXPECT_FALSE(none.src_holds(pfx("p"), id(2)));
}

TEST(NscNextHops, ClauseByClause) {
  DnrpRouter r(id(10));
  for (std::uint32_t n : {2u, 3u, 4u, 11u}) r.on_link_up(id(n), Cost(1));
  tell(r, 2, kU, Cost(1));
  tell(r, 3, kU, Cost(2));
  tell(r, 4, kU, Cost(3));
  tell(r, 11, kU, Cost(2));
  const Cost fd = r.route(pfx("p"))->feasible_distance;
  ASSERT_EQ(fd, Cost(2));

  std::set<RouterId> expected;
  for (const auto& [n, d] : std::map<std::uint32_t, Cost>{{2, Cost(1)}, {3, Cost(2)}, {4, Cost(3)}, {11, Cost(2)}}) {
    if (d < fd || (d == fd && n < 10)) expected.insert(id(n));
  }
  EXPECT_EQ(expected, (std::set<RouterId>{id(2), id(3)}));
  EXPECT_EQ(r.nsc_next_hops(pfx("p")), expected);
  EXPECT_EQ(r.route(pfx("p"))->valid_next_hops, expected);
}

TEST(NscNextHops, AnchorAndUnknownPrefix) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  r.on_prefix_add(pfx("p"));
  tell(r, 2, kU, Cost(1), 1);
  EXPECT_TRUE(r.nsc_next_hops(pfx("p")).empty());
  EXPECT_TRUE(r.nsc_next_hops(pfx("unknown")).empty());
}

TEST(HandlePassive, SingleNeighborFirstRoute) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  const auto out = tell(r, 2, kU, Cost(1), 7);
  const RouteEntry* e = r.route(pfx("p"));
  EXPECT_EQ(e->mode, Mode::kPassive);
  EXPECT_EQ(e->distance, Cost(2));
  EXPECT_EQ(e->feasible_distance, Cost(2));
  EXPECT_EQ(e->successor, id(2));
  EXPECT_EQ(e->anchor, id(7));
  EXPECT_EQ(sent(out), (Sent{{2, kU, Cost(2)}}));
}

TEST(HandlePassive, FeasibleSwitchIsLocal) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  r.on_link_up(id(3), Cost(1));
  tell(r, 2, kU, Cost(3));
  const auto out = tell(r, 3, kU, Cost(1));
  const RouteEntry* e = r.route(pfx("p"));
  EXPECT_EQ(e->successor, id(3));
  EXPECT_EQ(e->distance, Cost(2));
  EXPECT_EQ(e->feasible_distance, Cost(2));
  EXPECT_EQ(e->mode, Mode::kPassive);
  EXPECT_EQ(sent(out), (Sent{{2, kU, Cost(2)}, {3, kU, Cost(2)}}));
}

TEST(HandlePassive, QueryFromSuccessorWithFeasibleAlternativeIsAnswered) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  r.on_link_up(id(3), Cost(2));
  tell(r, 2, kU, Cost(1));
  tell(r, 3, kU, Cost(1));
  // Successor 2 goes to 5; 3 offers 1 + 2 = 3 with 1 < fd = 2.
  const auto out = tell(r, 2, kQ, Cost(5));
  const RouteEntry* e = r.route(pfx("p"));
  EXPECT_EQ(e->mode, Mode::kPassive);
  EXPECT_EQ(e->successor, id(3));
  EXPECT_EQ(e->distance, Cost(3));
  EXPECT_EQ(sent(out), (Sent{{2, kR, Cost(3)}, {3, kU, Cost(3)}}));
}

TEST(HandleActive, NonSuccessorQueryGetsReplyAndStateIsFrozen) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  r.on_link_up(id(3), Cost(1));
  tell(r, 2, kU, Cost(1));
  tell(r, 3, kU, Cost(4));
  tell(r, 2, kU, Cost(6));  // no feasible successor
  const RouteEntry before = *r.route(pfx("p"));
  ASSERT_EQ(before.mode, Mode::kActive);
  ASSERT_EQ(before.origin, 1);

  const auto out = tell(r, 3, kQ, Cost(9));
  const RouteEntry* e = r.route(pfx("p"));
  EXPECT_EQ(sent(out), (Sent{{3, kR, Cost(7)}}));
  EXPECT_EQ(e->successor, before.successor);
  EXPECT_EQ(e->feasible_distance, before.feasible_distance);
  EXPECT_EQ(e->distance, before.distance);
  EXPECT_EQ(e->origin, 1);
}

TEST(HandleActive, UpdateWhileActiveOnlyRecorded) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  r.on_link_up(id(3), Cost(1));
  tell(r, 2, kU, Cost(1));
  tell(r, 2, kU, Cost(6));
  const auto out = tell(r, 3, kU, Cost(0));
  EXPECT_TRUE(out.empty());
  EXPECT_EQ(r.route(pfx("p"))->successor, id(2));
  EXPECT_EQ(r.reported(pfx("p"), id(3)).distance, Cost(0));
}

TEST(HandleActive, DuplicateReplyRejected) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  r.on_link_up(id(3), Cost(1));
  tell(r, 2, kU, Cost(1));
  tell(r, 2, kU, Cost(6));
  tell(r, 3, kR, Cost::infinity());
  EXPECT_THROW(tell(r, 3, kR, Cost::infinity()), ProtocolError);
}

TEST(UpdateRoute, LastReplyOrigin1ResetsFeasibleDistance) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  r.on_link_up(id(3), Cost(1));
  tell(r, 2, kU, Cost(1));
  tell(r, 3, kU, Cost(4));
  tell(r, 2, kU, Cost(6));
  EXPECT_EQ(origins(r), (std::vector<std::pair<int, int>>{{0, 1}}));
  tell(r, 2, kR, Cost(6));
  const auto out = tell(r, 3, kR, Cost(4));
  const RouteEntry* e = r.route(pfx("p"));
  // fd reset to infinity, then min(inf, 4 + 1).
  EXPECT_EQ(e->mode, Mode::kPassive);
  EXPECT_EQ(e->successor, id(3));
  EXPECT_EQ(e->distance, Cost(5));
  EXPECT_EQ(e->feasible_distance, Cost(5));
  EXPECT_EQ(sent(out), (Sent{{2, kU, Cost(5)}, {3, kU, Cost(5)}}));
  EXPECT_EQ(origins(r), (std::vector<std::pair<int, int>>{{1, 0}}));
}

TEST(UpdateRoute, Origin2WithoutFeasibleSuccessorRequeriesAsOrigin1) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  r.on_link_up(id(3), Cost(1));
  tell(r, 2, kU, Cost(1));
  tell(r, 3, kU, Cost(5));
  tell(r, 2, kU, Cost(4));  // via 2 is 5, 4 >= fd 2: ACTIVE, origin 1
  tell(r, 2, kU, Cost(6));  // successor distance rises: origin 2
  tell(r, 3, kR, Cost(5));
  const auto out = tell(r, 2, kR, Cost(6));
  // fd stays 2; best is 3 at 6 with 5 >= 2, so a new computation starts at 6 + 1.
  const RouteEntry* e = r.route(pfx("p"));
  EXPECT_EQ(e->mode, Mode::kActive);
  EXPECT_EQ(e->origin, 1);
  EXPECT_EQ(e->feasible_distance, Cost(2));
  EXPECT_EQ(e->distance, Cost(7));
  EXPECT_EQ(sent(out), (Sent{{2, kQ, Cost(7)}, {3, kQ, Cost(7)}}));

  tell(r, 2, kR, Cost(6));
  tell(r, 3, kR, Cost(5));
  EXPECT_EQ(r.route(pfx("p"))->distance, Cost(6));
  EXPECT_EQ(r.route(pfx("p"))->successor, id(3));
  EXPECT_EQ(origins(r), (std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 1}, {1, 0}}));
}

TEST(UpdateRoute, Origin4WithoutFeasibleSuccessorRequeriesAsOrigin3ThenRepliesOnce) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  r.on_link_up(id(3), Cost(1));
  tell(r, 2, kU, Cost(1));
  tell(r, 3, kU, Cost(5));
  const auto q = tell(r, 2, kQ, Cost(4));  // QUERY from the successor, nothing feasible
  EXPECT_EQ(sent(q), (Sent{{2, kQ, Cost(5)}, {3, kQ, Cost(5)}}));
  r.on_link_cost(id(2), Cost(3));  // successor got further away: origin 4
  tell(r, 3, kR, Cost(5));
  const auto again = tell(r, 2, kR, Cost(4));
  // fd 2 kept; best is 3 at 6 and 5 >= 2: query again at 4 + 3, REPLY to 2 still held.
  EXPECT_EQ(r.route(pfx("p"))->origin, 3);
  EXPECT_EQ(r.route(pfx("p"))->distance, Cost(7));
  EXPECT_EQ(sent(again), (Sent{{2, kQ, Cost(7)}, {3, kQ, Cost(7)}}));

  tell(r, 2, kR, Cost(4));
  const auto done = tell(r, 3, kR, Cost(5));
  EXPECT_EQ(r.route(pfx("p"))->mode, Mode::kPassive);
  EXPECT_EQ(r.route(pfx("p"))->distance, Cost(6));
  EXPECT_EQ(sent(done), (Sent{{2, kR, Cost(6)}, {3, kU, Cost(6)}}));
  EXPECT_EQ(origins(r), (std::vector<std::pair<int, int>>{{0, 3}, {3, 4}, {4, 3}, {3, 0}}));
}

TEST(UpdateRoute, Origin4WithFeasibleSuccessorRepliesToPreviousSuccessor) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  r.on_link_up(id(3), Cost(1));
  tell(r, 2, kU, Cost(1));
  tell(r, 3, kU, Cost(5));
  tell(r, 2, kQ, Cost(4));
  r.on_link_cost(id(2), Cost(3));
  tell(r, 2, kR, Cost(4));
  const auto out = tell(r, 3, kR, Cost(1));  // 1 < fd 2
  const RouteEntry* e = r.route(pfx("p"));
  EXPECT_EQ(e->mode, Mode::kPassive);
  EXPECT_EQ(e->successor, id(3));
  EXPECT_EQ(e->distance, Cost(2));
  EXPECT_EQ(e->feasible_distance, Cost(2));
  EXPECT_EQ(sent(out), (Sent{{2, kR, Cost(2)}, {3, kU, Cost(2)}}));
  EXPECT_EQ(origins(r), (std::vector<std::pair<int, int>>{{0, 3}, {3, 4}, {4, 0}}));
}

TEST(UpdateRoute, QueryFromSuccessorWhileOrigin1IsHeldUntilPassive) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  r.on_link_up(id(3), Cost(1));
  tell(r, 2, kU, Cost(1));
  tell(r, 3, kU, Cost(5));
  tell(r, 2, kU, Cost(4));
  const auto held = tell(r, 2, kQ, Cost(4));
  EXPECT_TRUE(held.empty());
  EXPECT_EQ(r.route(pfx("p"))->origin, 4);
  tell(r, 3, kR, Cost(5));
  const auto out = tell(r, 2, kR, Cost(4));
  // 4 -> 3 leaves fd at 2; nothing feasible, so it asks again before answering 2.
  EXPECT_EQ(r.route(pfx("p"))->origin, 3);
  EXPECT_EQ(sent(out), (Sent{{2, kQ, Cost(5)}, {3, kQ, Cost(5)}}));
}

TEST(LinkEvents, NonSuccessorCostChangeOutsideNscSendsNothing) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  r.on_link_up(id(3), Cost(1));
  tell(r, 2, kU, Cost(1));
  tell(r, 3, kU, Cost(4));
  EXPECT_TRUE(r.on_link_cost(id(3), Cost(5)).empty());
  EXPECT_EQ(r.route(pfx("p"))->distance, Cost(2));
}

TEST(LinkEvents, AnchorLinkFailureLeavesSoleNeighborUnreachable) {
  // Two routers, prefix at 1; the only link fails.
  DnrpRouter a(id(1));
  DnrpRouter b(id(2));
  a.on_link_up(id(2), Cost(1));
  b.on_link_up(id(1), Cost(1));
  const auto adv = a.on_prefix_add(pfx("p"));
  ASSERT_EQ(adv.size(), 1u);
  EXPECT_EQ(sent(b.on_message(adv.front())), (Sent{{1, kU, Cost(1)}}));
  b.take_transitions();

  EXPECT_TRUE(a.on_link_down(id(2)).empty());
  EXPECT_TRUE(b.on_link_down(id(1)).empty());
  const RouteEntry* e = b.route(pfx("p"));
  EXPECT_EQ(e->mode, Mode::kPassive);
  EXPECT_TRUE(e->distance.is_infinite());
  EXPECT_TRUE(e->feasible_distance.is_infinite());
  EXPECT_FALSE(e->successor);
  EXPECT_FALSE(e->anchor);
  EXPECT_EQ(origins(b), (std::vector<std::pair<int, int>>{{0, 1}, {1, 0}}));
}

TEST(LinkEvents, LinkUpSendsFiniteRoutesOnly) {
  DnrpRouter r(id(1));
  r.on_prefix_add(pfx("p"));
  r.on_link_up(id(2), Cost(1));
  r.on_message(message(2, 1, {record("q", kU, Cost::infinity(), std::nullopt)}));
  ASSERT_NE(r.route(pfx("q")), nullptr);
  const auto out = r.on_link_up(id(3), Cost(2));
  EXPECT_EQ(sent(out), (Sent{{3, kU, Cost(0)}}));
}

TEST(LinkEvents, ReturningOldSuccessorIsNotTheSuccessor) {
  DnrpRouter r(id(5));
  r.on_link_up(id(1), Cost(1));
  r.on_link_up(id(2), Cost(1));
  tell(r, 1, kU, Cost(1));
  tell(r, 2, kU, Cost(4));
  r.take_transitions();
  r.on_link_down(id(1));
  EXPECT_EQ(origins(r), (std::vector<std::pair<int, int>>{{0, 1}}));
  EXPECT_FALSE(r.snapshot().find(pfx("p"))->successor);

  r.on_link_up(id(1), Cost(1));
  // Router 1 is computing too and asks us; waiting for it would deadlock.
  const auto out = tell(r, 1, kQ, Cost::infinity());
  EXPECT_EQ(sent(out), (Sent{{1, kR, Cost::infinity()}}));
  EXPECT_TRUE(origins(r).empty());
  const RouterSnapshot snap = r.snapshot();
  const RouteView* v = snap.find(pfx("p"));
  EXPECT_EQ(v->mode, Mode::kActive);
  EXPECT_EQ(v->pending_replies, std::vector<RouterId>{id(2)});
  EXPECT_TRUE(v->pending_queries.empty());
}

TEST(PrefixEvents, AddAtIsolatedRouter) {
  DnrpRouter r(id(1));
  EXPECT_TRUE(r.on_prefix_add(pfx("p")).empty());
  const RouteEntry* e = r.route(pfx("p"));
  EXPECT_EQ(e->distance, Cost(0));
  EXPECT_EQ(e->feasible_distance, Cost(0));
  EXPECT_EQ(e->anchor, id(1));
  EXPECT_THROW(r.on_prefix_add(pfx("p")), ProtocolError);
  EXPECT_THROW(r.on_prefix_delete(pfx("q")), ProtocolError);
}

TEST(PrefixEvents, MessagesFromNonNeighborRejected) {
  DnrpRouter r(id(1));
  EXPECT_THROW(tell(r, 2, kU, Cost(1)), ProtocolError);
}

TEST(Operations, CountedPerEventAndNeighborLoop) {
  DnrpRouter r(id(1));
  r.on_link_up(id(2), Cost(1));
  r.on_link_up(id(3), Cost(1));
  const std::uint64_t before = r.operations();
  tell(r, 2, kU, Cost(1));
  // event + select_best over 2 neighbors + flag_all over 2 neighbors
  EXPECT_EQ(r.operations() - before, 5u);
}

namespace {

ScenarioScript chain_failure() {
  ScenarioScript s;
  s.topology = dnrp::test::path(5);
  s.topology.add_anchor(pfx("p"), id(1));
  s.events.emplace_back(10, LinkDown{id(1), id(2)});
  return s;
}

}  // namespace

TEST(Diffusion, ChainFailurePropagatesAndUnwinds) {
  const SimulationTrace t = run_script(chain_failure(), RunOptions{CheckMode::kEveryStep, true, 0});
  ASSERT_TRUE(t.quiescent);
  EXPECT_TRUE(t.violations.empty()) << describe(t.violations.front());

  std::vector<std::tuple<std::uint32_t, int, int>> states;
  for (const TraceEntry& e : t.entries) {
    if (e.type == TraceType::kState && e.tick >= 10) states.emplace_back(e.a.value, e.transition.from, e.transition.to);
  }
  // 2 loses its successor; 3, 4 and 5 are each queried by their successor;
  // replies unwind from the end of the chain back to 2.
  const std::vector<std::tuple<std::uint32_t, int, int>> expected{
      {2, 0, 1}, {3, 0, 3}, {4, 0, 3}, {5, 0, 3}, {5, 3, 0}, {4, 3, 0}, {3, 3, 0}, {2, 1, 0}};
  EXPECT_EQ(states, expected);
  for (const RouterSnapshot& s : t.final_snapshots) {
    if (s.router == id(1)) continue;
    EXPECT_TRUE(s.find(pfx("p"))->distance.is_infinite()) << s.router;
  }
}

TEST(Diffusion, PrefixDeleteAtOneOfTwoAnchorsConvergesToSurvivor) {
  ScenarioScript s;
  s.topology = dnrp::test::path(6);
  s.topology.add_anchor(pfx("p"), id(1));
  s.topology.add_anchor(pfx("p"), id(6));
  s.events.emplace_back(5, PrefixDelete{id(6), pfx("p")});
  const SimulationTrace t = run_script(s, RunOptions{CheckMode::kEveryStep, false, 0});
  ASSERT_TRUE(t.quiescent);
  EXPECT_TRUE(t.violations.empty());
  for (const RouterSnapshot& snap : t.final_snapshots) {
    EXPECT_EQ(snap.find(pfx("p"))->distance, Cost(snap.router.value - 1));
  }
}

TEST(Diffusion, LinkUpShortensDownstreamPaths) {
  ScenarioScript s;
  s.topology = dnrp::test::path(6);
  s.topology.add_anchor(pfx("p"), id(1));
  s.events.emplace_back(20, LinkUp{id(1), id(5), Cost(1), 1});
  const SimulationTrace t = run_script(s, RunOptions{CheckMode::kEveryStep, false, 0});
  ASSERT_TRUE(t.quiescent);
  EXPECT_TRUE(t.violations.empty());
  const dnrp::test::AllPairs apsp(t.final_topology);
  for (const RouterSnapshot& snap : t.final_snapshots) {
    EXPECT_EQ(snap.find(pfx("p"))->distance, apsp.at(snap.router, id(1))) << snap.router;
  }
  EXPECT_EQ(apsp.at(id(6), id(1)), Cost(2));
}

TEST(Locality, CostChangeTouchesOnlyChangedRoutersAndTheirNeighbors) {
  namespace f1 = dnrp::figure1;
  Topology before = f1::topology();
  Topology after = before;
  after.set_cost(f1::kR, f1::kA, f1::kRaisedCost);
  const auto anchors = before.anchors_of(f1::kPrefix);
  const dnrp::test::AllPairs old_paths(before);
  const dnrp::test::AllPairs new_paths(after);

  std::set<RouterId> changed;
  for (RouterId r : before.routers()) {
    bool differs = old_paths.nearest(r, anchors) != new_paths.nearest(r, anchors);
    for (const auto& [n, c] : before.neighbors(r)) {
      differs = differs || old_paths.on_shortest_path(r, n, anchors) != new_paths.on_shortest_path(r, n, anchors);
    }
    if (differs) changed.insert(r);
  }
  std::set<RouterId> allowed = changed;
  for (RouterId r : changed) {
    for (const auto& [n, c] : after.neighbors(r)) allowed.insert(n);
  }

  const f1::Result res = f1::replay();
  ASSERT_TRUE(res.ok()) << res.diff();
  std::set<RouterId> senders;
  for (const TraceEntry& e : res.run.entries) {
    if (e.type == TraceType::kSend) senders.insert(e.a);
  }
  EXPECT_FALSE(senders.empty());
  for (RouterId r : senders) EXPECT_TRUE(allowed.contains(r)) << "router " << f1::name_of(r) << " sent outside the region";
  EXPECT_FALSE(senders.contains(f1::kZ));
}
