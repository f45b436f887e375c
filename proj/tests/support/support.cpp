#include "support.hpp"

#include <algorithm>
#include <iterator>
#include <random>

namespace dnrp::test {

UpdateRecord record(const std::string& prefix, UpdateKind kind, Cost distance, std::optional<RouterId> anchor) {
  return UpdateRecord{PrefixName(prefix), kind, distance, anchor};
}

RoutingMessage message(std::uint32_t from, std::uint32_t to, std::vector<UpdateRecord> records) {
  return RoutingMessage{RouterId(from), RouterId(to), std::move(records)};
}

Topology path(std::uint32_t n) {
  Topology t;
  for (std::uint32_t i = 1; i <= n; ++i) t.add_router(id(i));
  for (std::uint32_t i = 1; i < n; ++i) t.add_link(id(i), id(i + 1), Cost(1));
  return t;
}

Topology ring(std::uint32_t n) {
  Topology t = path(n);
  t.add_link(id(n), id(1), Cost(1));
  return t;
}

AllPairs::AllPairs(const Topology& t) : topo_(t) {
  for (RouterId r : t.routers()) index_.emplace(r, index_.size());
  const std::size_t n = index_.size();
  d_.assign(n, std::vector<Cost>(n, Cost::infinity()));
  for (std::size_t i = 0; i < n; ++i) d_[i][i] = Cost(0);
  for (const auto& [key, spec] : t.links()) {
    const std::size_t a = index_.at(key.a);
    const std::size_t b = index_.at(key.b);
    d_[a][b] = std::min(d_[a][b], spec.cost);
    d_[b][a] = std::min(d_[b][a], spec.cost);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d_[i][j] = std::min(d_[i][j], d_[i][k] + d_[k][j]);
    }
  }
}

Cost AllPairs::at(RouterId a, RouterId b) const { return d_[index_.at(a)][index_.at(b)]; }

Cost AllPairs::nearest(RouterId r, const std::set<RouterId>& anchors) const {
  Cost best = Cost::infinity();
  for (RouterId a : anchors) best = std::min(best, at(r, a));
  return best;
}

bool AllPairs::on_shortest_path(RouterId r, RouterId n, const std::set<RouterId>& anchors) const {
  if (!topo_.has_link(r, n)) return false;
  const Cost here = nearest(r, anchors);
  return here.is_finite() && topo_.link(r, n).cost + nearest(n, anchors) == here;
}

namespace {

class Dice {
 public:
  explicit Dice(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t roll(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
  }

  template <class C>
  auto pick(const C& c) {
    return *std::next(c.begin(), static_cast<std::ptrdiff_t>(roll(0, c.size() - 1)));
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

ScenarioScript random_script(std::uint64_t seed, Protocol protocol, const FuzzShape& shape) {
  Dice dice(seed);
  ScenarioScript s;
  s.protocol = protocol;
  s.seed = seed;
  Topology& t = s.topology;

  const auto n = static_cast<std::uint32_t>(dice.roll(shape.min_nodes, shape.max_nodes));
  for (std::uint32_t i = 1; i <= n; ++i) t.add_router(id(i));
  auto random_link = [&](RouterId a, RouterId b) {
    t.add_link(a, b, Cost(dice.roll(1, shape.max_cost)), dice.roll(1, shape.max_delay));
  };
  for (std::uint32_t i = 2; i <= n; ++i) random_link(id(i), id(static_cast<std::uint32_t>(dice.roll(1, i - 1))));
  const std::uint64_t extra = dice.roll(0, n);
  for (std::uint64_t k = 0; k < extra; ++k) {
    const RouterId a = id(static_cast<std::uint32_t>(dice.roll(1, n)));
    const RouterId b = id(static_cast<std::uint32_t>(dice.roll(1, n)));
    if (a != b && !t.has_link(a, b)) random_link(a, b);
  }

  std::uint32_t names = 0;
  const std::uint64_t prefixes = dice.roll(1, shape.max_prefixes);
  for (std::uint64_t k = 0; k < prefixes; ++k) {
    const PrefixName p("f" + std::to_string(names++));
    const std::uint64_t anchors = dice.roll(1, shape.max_anchors);
    for (std::uint64_t j = 0; j < anchors; ++j) t.add_anchor(p, id(static_cast<std::uint32_t>(dice.roll(1, n))));
  }

  // Replay the script against a model so every event is valid when it fires.
  Topology model = t;
  std::map<LinkKey, LinkSpec> failed;
  Tick at = 1;
  const std::uint64_t events = dice.roll(shape.min_events, shape.max_events);
  while (s.events.size() < events) {
    at += dice.roll(0, 6);
    switch (dice.roll(0, 4)) {
      case 0: {
        if (model.links().empty()) break;
        const auto [key, spec] = dice.pick(model.links());
        model.remove_link(key.a, key.b);
        failed.emplace(key, spec);
        s.events.emplace_back(at, LinkDown{key.a, key.b});
        break;
      }
      case 1: {
        if (failed.empty()) break;
        const auto [key, spec] = dice.pick(failed);
        failed.erase(key);
        model.add_link(key.a, key.b, spec.cost, spec.delay);
        s.events.emplace_back(at, LinkUp{key.a, key.b, spec.cost, spec.delay});
        break;
      }
      case 2: {
        if (model.links().empty()) break;
        const auto [key, spec] = dice.pick(model.links());
        Cost cost(dice.roll(1, shape.max_cost));
        if (cost == spec.cost) cost = Cost(spec.cost.value() % shape.max_cost + 1);
        if (cost == spec.cost) break;
        model.set_cost(key.a, key.b, cost);
        s.events.emplace_back(at, LinkCostChange{key.a, key.b, cost});
        break;
      }
      case 3: {
        PrefixName p("f" + std::to_string(names));
        if (!model.anchors().empty() && dice.roll(0, 1) == 0) p = dice.pick(model.anchors()).first;
        else ++names;
        const RouterId r = id(static_cast<std::uint32_t>(dice.roll(1, n)));
        if (model.anchors_of(p).contains(r)) break;
        model.add_anchor(p, r);
        s.events.emplace_back(at, PrefixAdd{r, p});
        break;
      }
      default: {
        if (model.anchors().empty()) break;
        const auto [p, anchors] = dice.pick(model.anchors());
        const RouterId r = dice.pick(anchors);
        model.remove_anchor(p, r);
        s.events.emplace_back(at, PrefixDelete{r, p});
        break;
      }
    }
  }
  return s;
}

}  // namespace dnrp::test
