#include "dnrp/dnrp_router.hpp"

#include <algorithm>
#include <string>

namespace dnrp {

namespace {

std::string describe(RouterId me, const PrefixName& p) {
  return "router " + std::to_string(me.value) + " prefix " + p.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Table lookups and loop-freedom conditions

RouteEntry& DnrpRouter::entry(const PrefixName& p) {
  auto [it, inserted] = routes_.try_emplace(p);
  if (inserted) it->second.prefix = p;
  return it->second;
}

const RouteEntry* DnrpRouter::route(const PrefixName& p) const {
  auto it = routes_.find(p);
  return it == routes_.end() ? nullptr : &it->second;
}

NeighborEntry DnrpRouter::reported(const PrefixName& p, RouterId n) const {
  auto row = neighbor_table_.find(p);
  if (row == neighbor_table_.end()) return {};
  auto it = row->second.find(n);
  return it == row->second.end() ? NeighborEntry{} : it->second;
}

Cost DnrpRouter::reported_distance(const PrefixName& p, RouterId n) const { return reported(p, n).distance; }

Cost DnrpRouter::through_successor(const RouteEntry& r) const {
  if (!r.successor) return Cost::infinity();
  auto link = neighbors_.find(*r.successor);
  if (link == neighbors_.end()) return Cost::infinity();
  return reported_distance(r.prefix, *r.successor) + link->second;
}

bool DnrpRouter::feasible(const RouteEntry& r, RouterId n) const {
  const Cost d = reported_distance(r.prefix, n);
  if (d.is_infinite()) return false;
  return d < r.feasible_distance || (d == r.feasible_distance && order_less(n, me_));
}

Candidate DnrpRouter::best_candidate(const PrefixName& p) const {
  Candidate best;
  // neighbors_ iterates in ascending id order, so strict < keeps the smaller id on ties.
  for (const auto& [k, link] : neighbors_) {
    const Cost sum = reported_distance(p, k) + link;
    if (sum.is_finite() && sum < best.distance) best = {k, sum};
  }
  return best;
}

Candidate DnrpRouter::select_best(const PrefixName& p) {
  ops_ += neighbors_.size();
  return best_candidate(p);
}

bool DnrpRouter::src_holds(const PrefixName& p, RouterId n) const {
  auto link = neighbors_.find(n);
  if (link == neighbors_.end()) return false;
  const Cost d = reported_distance(p, n);
  if (d.is_infinite()) return false;
  const RouteEntry* r = route(p);
  const Cost fd = r ? r->feasible_distance : Cost::infinity();
  if (!(d < fd || (d == fd && order_less(n, me_)))) return false;
  return d + link->second == best_candidate(p).distance;
}

std::set<RouterId> DnrpRouter::nsc_next_hops(const PrefixName& p) const {
  std::set<RouterId> out;
  const RouteEntry* r = route(p);
  if (r == nullptr || r->feasible_distance.is_infinite()) return out;
  for (const auto& [n, link] : neighbors_) {
    if (feasible(*r, n)) out.insert(n);
  }
  return out;
}

void DnrpRouter::recompute_next_hops(RouteEntry& r) { r.valid_next_hops = nsc_next_hops(r.prefix); }

bool DnrpRouter::has_pending_replies(RouteEntry& r) {
  bool pending = false;
  for (const auto& [n, f] : r.flags) {
    ++ops_;
    pending = pending || f.pending_reply;
  }
  return pending;
}

// ---------------------------------------------------------------------------
// Signalling

void DnrpRouter::set_origin(RouteEntry& r, int to, TransitionCause cause) {
  transitions_.push_back(Transition{me_, r.prefix, r.origin, to, cause});
  r.origin = to;
}

void DnrpRouter::flag(RouteEntry& r, RouterId n, UpdateKind kind) {
  NeighborFlags& f = r.flags[n];
  touched_.insert(r.prefix);
  if (f.update && f.kind != kind) {
    // A REPLY or QUERY already carries the distance an UPDATE would.
    if (kind == UpdateKind::kUpdate) return;
    if (f.kind != UpdateKind::kUpdate) {
      throw std::logic_error("conflicting " + std::string(to_string(f.kind)) + "/" + std::string(to_string(kind)) +
                             " for neighbor " + std::to_string(n.value) + " at " + describe(me_, r.prefix));
    }
  }
  f.update = true;
  f.kind = kind;
}

void DnrpRouter::flag_all(RouteEntry& r, UpdateKind kind) {
  for (const auto& [n, link] : neighbors_) {
    ++ops_;
    flag(r, n, kind);
  }
}

void DnrpRouter::reply_now(const RouteEntry& r, RouterId n) {
  early_[n].push_back(make_record(r, UpdateKind::kReply));
}

UpdateRecord DnrpRouter::make_record(const RouteEntry& r, UpdateKind kind) const {
  UpdateRecord rec{r.prefix, kind, r.distance, std::nullopt};
  if (r.distance.is_finite()) {
    if (!r.anchor) throw std::logic_error("finite distance without anchor at " + describe(me_, r.prefix));
    rec.anchor = r.anchor;
  }
  return rec;
}

std::vector<RoutingMessage> DnrpRouter::flush() {
  std::vector<RoutingMessage> out;
  for (auto& [n, records] : early_) out.push_back(RoutingMessage{me_, n, std::move(records)});
  early_.clear();

  std::map<RouterId, std::vector<UpdateRecord>> regular;
  for (const PrefixName& p : touched_) {
    RouteEntry& r = routes_.at(p);
    for (auto& [n, f] : r.flags) {
      if (!f.update) continue;
      f.update = false;
      regular[n].push_back(make_record(r, f.kind));
    }
  }
  touched_.clear();
  for (auto& [n, records] : regular) out.push_back(RoutingMessage{me_, n, std::move(records)});
  return out;
}

std::vector<Transition> DnrpRouter::take_transitions() { return std::exchange(transitions_, {}); }

// ---------------------------------------------------------------------------
// PASSIVE processing

void DnrpRouter::handle_passive(RouteEntry& r, std::optional<Trigger> trigger) {
  const bool query = trigger && trigger->kind == UpdateKind::kQuery;
  if (local_.contains(r.prefix)) {
    if (query) flag(r, trigger->from, UpdateKind::kReply);
    return;
  }

  const Candidate best = select_best(r.prefix);
  // With nothing reachable and nothing currently advertised there is no
  // route to protect; otherwise the best candidate must satisfy SRC.
  const bool src = best.neighbor ? feasible(r, *best.neighbor) : r.distance.is_infinite();

  if (src) {
    r.successor = best.neighbor;
    r.anchor = best.neighbor ? reported(r.prefix, *best.neighbor).anchor : std::nullopt;
    if (r.distance != best.distance) {
      r.distance = best.distance;
      r.feasible_distance = std::min(r.feasible_distance, r.distance);
      flag_all(r, UpdateKind::kUpdate);
    }
    if (query) flag(r, trigger->from, UpdateKind::kReply);
    return;
  }

  const bool from_successor = query && r.successor == trigger->from;
  // A non-successor querier gets our current distance before our own computation starts.
  if (query && !from_successor) reply_now(r, trigger->from);

  r.mode = Mode::kActive;
  r.distance = through_successor(r);
  r.anchor = r.distance.is_finite() ? reported(r.prefix, *r.successor).anchor : std::nullopt;
  if (from_successor) {
    r.flags[trigger->from].pending_query = true;
    set_origin(r, 3, TransitionCause::kQueryFromSuccessor);
  } else {
    set_origin(r, 1, TransitionCause::kSrcNotSatisfied);
  }
  start_query(r);
}

void DnrpRouter::start_query(RouteEntry& r) {
  if (neighbors_.empty()) {
    // Nobody to wait for: the computation completes immediately.
    on_last_reply(r);
    return;
  }
  for (const auto& [n, link] : neighbors_) {
    ++ops_;
    NeighborFlags& f = r.flags[n];
    f.pending_reply = true;
    f.owed_update = false;
    flag(r, n, UpdateKind::kQuery);
  }
}

// ---------------------------------------------------------------------------
// ACTIVE processing

void DnrpRouter::handle_active(RouteEntry& r, RouterId from, UpdateKind kind, Cost before) {
  bool held = false;
  switch (kind) {
    case UpdateKind::kReply:
      r.flags[from].pending_reply = false;
      break;
    case UpdateKind::kQuery:
      if (r.successor == from && (r.origin == 1 || r.origin == 2)) {
        r.flags[from].pending_query = true;
        set_origin(r, 4, TransitionCause::kQueryFromSuccessor);
        held = true;
      } else {
        flag(r, from, UpdateKind::kReply);
      }
      break;
    case UpdateKind::kUpdate:
      break;
  }
  if (!held && r.successor == from && through_successor(r) > before) on_successor_increase(r);
  if (kind == UpdateKind::kReply && !has_pending_replies(r)) on_last_reply(r);
}

void DnrpRouter::on_successor_increase(RouteEntry& r) {
  if (r.origin == 1) set_origin(r, 2, TransitionCause::kSuccessorDistanceIncrease);
  else if (r.origin == 3) set_origin(r, 4, TransitionCause::kSuccessorDistanceIncrease);
}

void DnrpRouter::on_last_reply(RouteEntry& r) {
  if (r.origin == 1 || r.origin == 3) r.feasible_distance = Cost::infinity();
  update_route(r);
}

void DnrpRouter::update_route(RouteEntry& r) {
  const int from = r.origin;
  const bool local = local_.contains(r.prefix);

  Candidate best{std::nullopt, Cost(0)};
  bool src = true;
  if (!local) {
    best = select_best(r.prefix);
    // After a reset (fd infinite) an unreachable prefix is an acceptable outcome.
    src = best.neighbor ? feasible(r, *best.neighbor) : r.feasible_distance.is_infinite();
  }

  if (!src) {
    set_origin(r, from == 2 ? 1 : 3, TransitionCause::kLastReplySrcNotSatisfied);
    r.distance = through_successor(r);
    r.anchor = r.distance.is_finite() ? reported(r.prefix, *r.successor).anchor : std::nullopt;
    start_query(r);
    return;
  }

  r.mode = Mode::kPassive;
  set_origin(r, 0,
             from == 1 || from == 3 ? TransitionCause::kLastReply : TransitionCause::kLastReplySrcSatisfied);
  r.successor = best.neighbor;
  if (local) r.anchor = me_;
  else r.anchor = best.neighbor ? reported(r.prefix, *best.neighbor).anchor : std::nullopt;
  if (r.distance != best.distance) {
    r.distance = best.distance;
    flag_all(r, UpdateKind::kUpdate);
  }
  r.feasible_distance = std::min(r.feasible_distance, r.distance);

  for (auto& [n, f] : r.flags) {
    ++ops_;
    if (f.pending_query) {
      f.pending_query = false;
      flag(r, n, UpdateKind::kReply);
    }
    if (f.owed_update) {
      f.owed_update = false;
      if (r.distance.is_finite()) flag(r, n, UpdateKind::kUpdate);
    }
  }
}

// ---------------------------------------------------------------------------
// Event entry points

std::vector<RoutingMessage> DnrpRouter::on_message(const RoutingMessage& m) {
  if (m.to != me_) throw ProtocolError("message for router " + std::to_string(m.to.value) + " delivered to " + std::to_string(me_.value));
  if (!neighbors_.contains(m.from)) {
    throw ProtocolError("message from non-neighbor " + std::to_string(m.from.value) + " at router " + std::to_string(me_.value));
  }
  ++ops_;
  std::set<PrefixName> seen;
  for (const UpdateRecord& rec : m.records) {
    if (!seen.insert(rec.prefix).second) throw ProtocolError("duplicate record in one message at " + describe(me_, rec.prefix));
    RouteEntry& r = entry(rec.prefix);
    if (rec.kind == UpdateKind::kReply) {
      auto f = r.flags.find(m.from);
      if (r.mode == Mode::kPassive || f == r.flags.end() || !f->second.pending_reply) {
        throw ProtocolError("unexpected REPLY from " + std::to_string(m.from.value) + " at " + describe(me_, rec.prefix));
      }
    }
    touched_.insert(rec.prefix);
    const Cost before = through_successor(r);
    neighbor_table_[rec.prefix][m.from] =
        NeighborEntry{rec.distance, rec.distance.is_finite() ? rec.anchor : std::nullopt};

    if (r.mode == Mode::kPassive) handle_passive(r, Trigger{m.from, rec.kind});
    else handle_active(r, m.from, rec.kind, before);
    recompute_next_hops(r);
  }
  return flush();
}

std::vector<RoutingMessage> DnrpRouter::on_link_up(RouterId n, Cost cost) {
  if (n == me_ || neighbors_.contains(n)) throw ProtocolError("link up for existing adjacency at router " + std::to_string(me_.value));
  if (cost.is_infinite() || cost.value() == 0) throw ProtocolError("link cost must be finite and positive");
  ++ops_;
  neighbors_.emplace(n, cost);
  for (auto& [p, r] : routes_) {
    NeighborFlags& f = r.flags[n];
    f = NeighborFlags{};
    if (r.mode == Mode::kActive) {
      f.owed_update = true;
    } else if (r.distance.is_finite()) {
      ++ops_;
      flag(r, n, UpdateKind::kUpdate);
    }
  }
  return flush();
}

std::vector<RoutingMessage> DnrpRouter::on_link_down(RouterId n) {
  auto link = neighbors_.find(n);
  if (link == neighbors_.end()) throw ProtocolError("link down for unknown adjacency at router " + std::to_string(me_.value));
  ++ops_;
  const Cost old_cost = link->second;
  neighbors_.erase(link);

  for (auto& [p, r] : routes_) {
    auto& row = neighbor_table_[p];
    auto nt = row.find(n);
    const Cost old_report = nt == row.end() ? Cost::infinity() : nt->second.distance;
    auto fl = r.flags.find(n);
    const bool had_reply_pending = fl != r.flags.end() && fl->second.pending_reply;
    const bool had_query_pending = fl != r.flags.end() && fl->second.pending_query;
    if (nt != row.end()) row.erase(nt);
    if (fl != r.flags.end()) r.flags.erase(fl);
    if (old_report.is_infinite() && !had_reply_pending && !had_query_pending && r.successor != n) continue;

    ++ops_;
    touched_.insert(p);
    const bool lost_successor = r.successor == n;
    if (r.mode == Mode::kPassive) {
      if (lost_successor) r.successor.reset();
      handle_passive(r, std::nullopt);
    } else {
      // Losing the successor is a REPLY from it with infinite distance.
      if (lost_successor && old_report.is_finite()) {
        const Cost before = old_report + old_cost;
        if (through_successor(r) > before) on_successor_increase(r);
      }
      // A later adjacency with the same router must not count as the successor:
      // holding its QUERY would wait on a computation that waits on us.
      if (lost_successor) r.successor.reset();
      if (had_reply_pending && !has_pending_replies(r)) on_last_reply(r);
    }
    recompute_next_hops(r);
  }
  return flush();
}

std::vector<RoutingMessage> DnrpRouter::on_link_cost(RouterId n, Cost cost) {
  auto link = neighbors_.find(n);
  if (link == neighbors_.end()) throw ProtocolError("cost change for unknown adjacency at router " + std::to_string(me_.value));
  if (cost.is_infinite() || cost.value() == 0) throw ProtocolError("link cost must be finite and positive");
  ++ops_;
  const Cost old_cost = link->second;
  link->second = cost;
  if (old_cost == cost) return flush();

  for (auto& [p, r] : routes_) {
    const Cost report = reported_distance(p, n);
    if (report.is_infinite()) continue;
    ++ops_;
    touched_.insert(p);
    if (r.mode == Mode::kPassive) {
      handle_passive(r, std::nullopt);
    } else if (r.successor == n && cost > old_cost) {
      on_successor_increase(r);
    }
    recompute_next_hops(r);
  }
  return flush();
}

std::vector<RoutingMessage> DnrpRouter::on_prefix_add(const PrefixName& p) {
  if (!local_.insert(p).second) throw ProtocolError("prefix already anchored at " + describe(me_, p));
  ++ops_;
  RouteEntry& r = entry(p);
  touched_.insert(p);
  // An ACTIVE entry finishes its computation first and settles on distance 0 then.
  if (r.mode == Mode::kPassive) {
    r.successor.reset();
    r.anchor = me_;
    if (r.distance != Cost(0)) {
      r.distance = Cost(0);
      flag_all(r, UpdateKind::kUpdate);
    }
    r.feasible_distance = Cost(0);
    recompute_next_hops(r);
  }
  return flush();
}

std::vector<RoutingMessage> DnrpRouter::on_prefix_delete(const PrefixName& p) {
  if (local_.erase(p) == 0) throw ProtocolError("prefix not anchored at " + describe(me_, p));
  ++ops_;
  RouteEntry& r = entry(p);
  touched_.insert(p);
  if (r.mode == Mode::kPassive) {
    handle_passive(r, std::nullopt);
    recompute_next_hops(r);
  }
  return flush();
}

// ---------------------------------------------------------------------------

RouterSnapshot DnrpRouter::snapshot() const {
  RouterSnapshot s;
  s.router = me_;
  s.operations = ops_;
  for (const auto& [n, c] : neighbors_) s.neighbors.push_back(n);
  for (const auto& [p, r] : routes_) {
    RouteView v;
    v.distance = r.distance;
    v.feasible_distance = r.feasible_distance;
    v.successor = r.successor;
    v.anchor = r.anchor;
    v.next_hops.assign(r.valid_next_hops.begin(), r.valid_next_hops.end());
    if (auto row = neighbor_table_.find(p); row != neighbor_table_.end()) {
      for (const auto& [n, e] : row->second) {
        if (e.distance.is_finite()) v.reported.emplace_back(n, e.distance);
      }
    }
    v.mode = r.mode;
    v.origin = r.origin;
    for (const auto& [n, f] : r.flags) {
      if (f.pending_reply) v.pending_replies.push_back(n);
      if (f.pending_query) v.pending_queries.push_back(n);
    }
    v.local = local_.contains(p);
    s.routes.emplace(p, std::move(v));
  }
  return s;
}

}  // namespace dnrp
