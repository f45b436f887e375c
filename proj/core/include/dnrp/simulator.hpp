#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnrp/snapshot.hpp"
#include "dnrp/trace.hpp"
#include "dnrp/types.hpp"

namespace dnrp {

/// A scripted event that does not fit the current topology, e.g. a link
/// failure for a link that does not exist.
class ScriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimOptions {
  bool record_trace = true;
  std::uint64_t event_cap = 0;  // max deliveries per run() call, 0 = unlimited
};

struct RunResult {
  bool quiescent = true;
  std::uint64_t deliveries = 0;
};

struct StepInfo {
  std::uint64_t event_index = 0;
  Tick tick = 0;
  std::vector<RouterId> touched;  // routers whose state may have changed
};

/// Deterministic discrete-event simulator driving one engine per router.
///
/// Links deliver in FIFO order per direction. Each link incarnation has an
/// epoch; messages sent on an earlier incarnation are dropped on arrival.
/// The initial topology is brought up at tick 0 by LinkUp and PrefixAdd
/// events, so the first run() performs the initial convergence.
template <class Engine>
class Simulator {
 public:
  using Observer = std::function<void(const Simulator&, const StepInfo&)>;
  /// Returns true for messages that should be lost in transit.
  using DropFilter = std::function<bool(const Message&)>;

  explicit Simulator(const Topology& initial, SimOptions opts = {}) : opts_(opts) {
    for (RouterId r : initial.routers()) {
      index_.emplace(r, engines_.size());
      engines_.emplace_back(r);
      live_.add_router(r);
    }
    cache_.resize(engines_.size());
    stale_.assign(engines_.size(), true);
    for (const auto& [key, spec] : initial.links()) schedule(0, LinkUp{key.a, key.b, spec.cost, spec.delay});
    for (const auto& [p, anchors] : initial.anchors()) {
      for (RouterId a : anchors) schedule(0, PrefixAdd{a, p});
    }
  }

  void schedule(Tick at, ExternalEvent ev) {
    if (at < now_) throw ScriptError("event scheduled in the past at tick " + std::to_string(at));
    queue_.push(SimEvent{at, seq_++, std::visit([](auto&& x) -> EventBody { return x; }, std::move(ev))});
  }

  void set_drop_filter(DropFilter f) { drop_ = std::move(f); }
  void set_options(SimOptions opts) { opts_ = opts; }

  /// Processes events until the queue is empty or the delivery cap is hit.
  RunResult run(const Observer& observer = {}) {
    RunResult result;
    while (!queue_.empty()) {
      if (opts_.event_cap != 0 && result.deliveries >= opts_.event_cap) {
        result.quiescent = false;
        return result;
      }
      SimEvent ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      if (!measuring_) {
        measuring_ = true;
        metrics_.first_tick = now_;
      }
      metrics_.last_tick = now_;
      ++metrics_.events;
      touched_.clear();
      if (std::holds_alternative<Deliver>(ev.body)) ++result.deliveries;
      std::visit([this](auto& body) { apply(body); }, ev.body);
      if (observer) observer(*this, StepInfo{event_index_, now_, touched_});
      ++event_index_;
    }
    return result;
  }

  bool idle() const { return queue_.empty(); }
  Tick now() const { return now_; }
  std::uint64_t event_index() const { return event_index_; }
  const Topology& topology() const { return live_; }

  Engine& engine(RouterId r) {
    const std::size_t i = index_.at(r);
    stale_[i] = true;
    return engines_[i];
  }
  const Engine& engine(RouterId r) const { return engines_.at(index_.at(r)); }
  const std::vector<Engine>& engines() const { return engines_; }

  /// Snapshots of every router in ascending id order, refreshed lazily.
  const std::vector<RouterSnapshot>& snapshots() const {
    for (std::size_t i = 0; i < engines_.size(); ++i) {
      if (!stale_[i]) continue;
      cache_[i] = engines_[i].snapshot();
      stale_[i] = false;
    }
    return cache_;
  }

  std::uint64_t operations() const {
    std::uint64_t total = 0;
    for (const Engine& e : engines_) total += e.operations();
    return total;
  }

  const Metrics& metrics() const { return metrics_; }
  void reset_metrics() {
    metrics_ = Metrics{};
    measuring_ = false;
  }

  const std::vector<TraceEntry>& trace() const { return trace_; }
  void clear_trace() { trace_.clear(); }

 private:
  void link_entry(TraceType type, RouterId a, RouterId b, std::string value) {
    if (!opts_.record_trace) return;
    TraceEntry e;
    e.type = type;
    e.tick = now_;
    e.event_index = event_index_;
    e.a = a;
    e.b = b;
    e.value = std::move(value);
    trace_.push_back(std::move(e));
  }

  void prefix_entry(TraceType type, RouterId r, const PrefixName& p) {
    if (!opts_.record_trace) return;
    TraceEntry e;
    e.type = type;
    e.tick = now_;
    e.event_index = event_index_;
    e.a = r;
    e.item = p.str();
    trace_.push_back(std::move(e));
  }

  Engine& touch(RouterId r) {
    const std::size_t i = index_.at(r);
    stale_[i] = true;
    touched_.push_back(r);
    return engines_[i];
  }

  void emit(Engine& engine, std::vector<typename Engine::message_type> out) {
    for (Transition& t : engine.take_transitions()) {
      if (!opts_.record_trace) continue;
      TraceEntry e;
      e.type = TraceType::kState;
      e.tick = now_;
      e.event_index = event_index_;
      e.a = t.router;
      e.item = t.prefix.str();
      e.transition = std::move(t);
      trace_.push_back(std::move(e));
    }
    for (auto& m : out) {
      const LinkKey key(m.from, m.to);
      auto link = live_.links().find(key);
      if (link == live_.links().end()) {
        throw std::logic_error("router " + std::to_string(m.from.value) + " sent on missing link");
      }
      Message msg(std::move(m));
      const std::string kind = message_kind(msg);
      ++metrics_.messages_by_kind[kind];
      ++metrics_.messages_total;
      metrics_.updates_total += message_items(msg);
      if (opts_.record_trace) trace_message(trace_, TraceType::kSend, now_, event_index_, msg);
      queue_.push(SimEvent{now_ + link->second.delay, seq_++, Deliver{std::move(msg), epochs_[key]}});
    }
  }

  void apply(const LinkUp& ev) {
    try {
      live_.add_link(ev.a, ev.b, ev.cost, ev.delay);
    } catch (const TopologyError& e) {
      throw ScriptError(std::string("linkup: ") + e.what());
    }
    ++epochs_[LinkKey(ev.a, ev.b)];
    link_entry(TraceType::kLinkUp, ev.a, ev.b, to_string(ev.cost));
    Engine& a = touch(ev.a);
    emit(a, a.on_link_up(ev.b, ev.cost));
    Engine& b = touch(ev.b);
    emit(b, b.on_link_up(ev.a, ev.cost));
  }

  void apply(const LinkDown& ev) {
    try {
      live_.remove_link(ev.a, ev.b);
    } catch (const TopologyError& e) {
      throw ScriptError(std::string("linkfail: ") + e.what());
    }
    ++epochs_[LinkKey(ev.a, ev.b)];
    link_entry(TraceType::kLinkDown, ev.a, ev.b, "");
    Engine& a = touch(ev.a);
    emit(a, a.on_link_down(ev.b));
    Engine& b = touch(ev.b);
    emit(b, b.on_link_down(ev.a));
  }

  void apply(const LinkCostChange& ev) {
    try {
      live_.set_cost(ev.a, ev.b, ev.cost);
    } catch (const TopologyError& e) {
      throw ScriptError(std::string("linkcost: ") + e.what());
    }
    link_entry(TraceType::kLinkCost, ev.a, ev.b, to_string(ev.cost));
    Engine& a = touch(ev.a);
    emit(a, a.on_link_cost(ev.b, ev.cost));
    Engine& b = touch(ev.b);
    emit(b, b.on_link_cost(ev.a, ev.cost));
  }

  void apply(const PrefixAdd& ev) {
    if (!live_.has_router(ev.router)) throw ScriptError("prefixadd at unknown router");
    if (live_.anchors_of(ev.prefix).contains(ev.router)) throw ScriptError("prefixadd: prefix already anchored there");
    live_.add_anchor(ev.prefix, ev.router);
    prefix_entry(TraceType::kPrefixAdd, ev.router, ev.prefix);
    Engine& r = touch(ev.router);
    emit(r, r.on_prefix_add(ev.prefix));
  }

  void apply(const PrefixDelete& ev) {
    try {
      live_.remove_anchor(ev.prefix, ev.router);
    } catch (const TopologyError& e) {
      throw ScriptError(std::string("prefixdel: ") + e.what());
    }
    prefix_entry(TraceType::kPrefixDelete, ev.router, ev.prefix);
    Engine& r = touch(ev.router);
    emit(r, r.on_prefix_delete(ev.prefix));
  }

  void apply(const Deliver& ev) {
    const RouterId from = sender_of(ev.message);
    const RouterId to = receiver_of(ev.message);
    const LinkKey key(from, to);
    const bool alive = live_.has_link(from, to) && epochs_[key] == ev.link_epoch;
    if (!alive || (drop_ && drop_(ev.message))) {
      ++metrics_.drops;
      if (opts_.record_trace) trace_message(trace_, TraceType::kDrop, now_, event_index_, ev.message);
      return;
    }
    ++metrics_.deliveries;
    if (opts_.record_trace) trace_message(trace_, TraceType::kRecv, now_, event_index_, ev.message);
    Engine& r = touch(to);
    emit(r, r.on_message(std::get<typename Engine::message_type>(ev.message)));
  }

  SimOptions opts_;
  std::vector<Engine> engines_;
  std::map<RouterId, std::size_t> index_;
  Topology live_;
  std::map<LinkKey, std::uint64_t> epochs_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, SimEventLater> queue_;
  std::uint64_t seq_ = 0;
  Tick now_ = 0;
  std::uint64_t event_index_ = 0;
  std::vector<RouterId> touched_;
  DropFilter drop_;
  Metrics metrics_;
  bool measuring_ = false;
  std::vector<TraceEntry> trace_;
  mutable std::vector<RouterSnapshot> cache_;
  mutable std::vector<bool> stale_;
};

}  // namespace dnrp
