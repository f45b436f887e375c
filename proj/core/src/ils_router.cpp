#include "dnrp/ils_router.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <string>

#include "dnrp/dnrp_router.hpp"

namespace dnrp {

void IlsRouter::send(std::vector<LinkStateMessage>& out, RouterId to, const Lsa& lsa) {
  std::uint64_t& known = known_[to][LsaKey(lsa.origin, lsa.kind)];
  if (known >= lsa.seq) return;
  known = lsa.seq;
  out.push_back(LinkStateMessage{me_, to, lsa});
}

std::vector<LinkStateMessage> IlsRouter::finish(std::vector<LinkStateMessage> out) {
  if (dirty_ && !held_) recompute_routes();
  return out;
}

void IlsRouter::hold_routes(bool hold) {
  held_ = hold;
  if (!held_ && dirty_) recompute_routes();
}

std::vector<LinkStateMessage> IlsRouter::originate_lsa(LsaKind kind) {
  Lsa& lsa = db_[LsaKey(me_, kind)];
  lsa.origin = me_;
  lsa.kind = kind;
  ++lsa.seq;
  lsa.adjacencies.clear();
  lsa.prefixes.clear();
  if (kind == LsaKind::kAdjacency) lsa.adjacencies.assign(neighbors_.begin(), neighbors_.end());
  else lsa.prefixes.assign(local_.begin(), local_.end());
  dirty_ = true;

  std::vector<LinkStateMessage> out;
  for (const auto& [n, cost] : neighbors_) send(out, n, lsa);
  return out;
}

std::vector<LinkStateMessage> IlsRouter::flood(const Lsa& lsa, RouterId from) {
  std::vector<LinkStateMessage> out;
  const LsaKey key(lsa.origin, lsa.kind);
  std::uint64_t& known = known_[from][key];
  known = std::max(known, lsa.seq);
  // Our own LSAs only change through originate_lsa.
  if (lsa.origin == me_) return out;
  auto it = db_.find(key);
  if (it != db_.end() && it->second.seq >= lsa.seq) return out;
  db_[key] = lsa;
  dirty_ = true;
  for (const auto& [n, cost] : neighbors_) {
    if (n != from) send(out, n, lsa);
  }
  return out;
}

std::vector<LinkStateMessage> IlsRouter::on_link_up(RouterId n, Cost cost) {
  if (n == me_ || neighbors_.contains(n)) throw ProtocolError("link up for existing adjacency at router " + std::to_string(me_.value));
  if (cost.is_infinite() || cost.value() == 0) throw ProtocolError("link cost must be finite and positive");
  ++ops_;
  neighbors_.emplace(n, cost);
  known_.erase(n);

  LsdbSummary summary;
  for (const auto& [key, lsa] : db_) summary.entries.emplace_back(key.first, key.second, lsa.seq);
  std::vector<LinkStateMessage> out{LinkStateMessage{me_, n, std::move(summary)}};
  auto lsas = originate_lsa(LsaKind::kAdjacency);
  out.insert(out.end(), lsas.begin(), lsas.end());
  return finish(std::move(out));
}

std::vector<LinkStateMessage> IlsRouter::on_link_down(RouterId n) {
  if (neighbors_.erase(n) == 0) throw ProtocolError("link down for unknown adjacency at router " + std::to_string(me_.value));
  ++ops_;
  known_.erase(n);
  return finish(originate_lsa(LsaKind::kAdjacency));
}

std::vector<LinkStateMessage> IlsRouter::on_link_cost(RouterId n, Cost cost) {
  auto it = neighbors_.find(n);
  if (it == neighbors_.end()) throw ProtocolError("cost change for unknown adjacency at router " + std::to_string(me_.value));
  if (cost.is_infinite() || cost.value() == 0) throw ProtocolError("link cost must be finite and positive");
  ++ops_;
  if (it->second == cost) return {};
  it->second = cost;
  return finish(originate_lsa(LsaKind::kAdjacency));
}

std::vector<LinkStateMessage> IlsRouter::on_prefix_add(const PrefixName& p) {
  if (!local_.insert(p).second) throw ProtocolError("prefix already anchored at router " + std::to_string(me_.value));
  ++ops_;
  return finish(originate_lsa(LsaKind::kPrefix));
}

std::vector<LinkStateMessage> IlsRouter::on_prefix_delete(const PrefixName& p) {
  if (local_.erase(p) == 0) throw ProtocolError("prefix not anchored at router " + std::to_string(me_.value));
  ++ops_;
  return finish(originate_lsa(LsaKind::kPrefix));
}

std::vector<LinkStateMessage> IlsRouter::on_message(const LinkStateMessage& m) {
  if (m.to != me_ || !neighbors_.contains(m.from)) {
    throw ProtocolError("link-state message from non-neighbor " + std::to_string(m.from.value) + " at router " +
                        std::to_string(me_.value));
  }
  ++ops_;
  if (const Lsa* lsa = std::get_if<Lsa>(&m.body)) return finish(flood(*lsa, m.from));

  const auto& summary = std::get<LsdbSummary>(m.body);
  auto& known = known_[m.from];
  for (const auto& [origin, kind, seq] : summary.entries) {
    std::uint64_t& k = known[LsaKey(origin, kind)];
    k = std::max(k, seq);
  }
  std::vector<LinkStateMessage> out;
  for (const auto& [key, lsa] : db_) send(out, m.from, lsa);
  return finish(std::move(out));
}

const std::map<PrefixName, IlsRoute>& IlsRouter::recompute_routes() {
  dirty_ = false;

  // Index every router named in the database; ascending ids give ascending indices.
  std::vector<RouterId> ids{me_};
  for (const auto& [key, lsa] : db_) {
    ids.push_back(key.first);
    for (const auto& [n, c] : lsa.adjacencies) ids.push_back(n);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto index_of = [&](RouterId r) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), r) - ids.begin());
  };

  // Advertised adjacencies per router, sorted by neighbor index.
  using Edge = std::pair<std::size_t, Cost::rep>;
  std::vector<std::vector<Edge>> advertised(ids.size());
  for (const auto& [key, lsa] : db_) {
    if (key.second != LsaKind::kAdjacency) continue;
    auto& adj = advertised[index_of(key.first)];
    for (const auto& [v, c] : lsa.adjacencies) adj.emplace_back(index_of(v), c.value());
    std::sort(adj.begin(), adj.end());
  }
  auto lists = [&](std::size_t u, std::size_t v) {
    const auto& adj = advertised[u];
    auto it = std::lower_bound(adj.begin(), adj.end(), Edge(v, 0));
    return it != adj.end() && it->first == v;
  };

  // Only links advertised by both endpoints are used.
  std::vector<std::vector<Edge>> graph(ids.size());
  for (std::size_t u = 0; u < ids.size(); ++u) {
    for (const auto& [v, c] : advertised[u]) {
      if (lists(v, u)) graph[u].emplace_back(v, c);
    }
  }

  constexpr Cost::rep kInf = Cost::infinity().value();
  std::vector<std::vector<Cost::rep>> dist_from;
  dist_from.reserve(neighbors_.size());
  for (const auto& [n, l] : neighbors_) {
    std::vector<Cost::rep> dist(ids.size(), kInf);
    using Item = std::pair<Cost::rep, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    const std::size_t root = index_of(n);
    if (root < ids.size() && ids[root] == n) {
      dist[root] = 0;
      heap.emplace(0, root);
    }
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d != dist[u]) continue;
      for (const auto& [v, c] : graph[u]) {
        ++ops_;
        if (d + c < dist[v]) {
          dist[v] = d + c;
          heap.emplace(dist[v], v);
        }
      }
    }
    dist_from.push_back(std::move(dist));
  }

  std::map<PrefixName, std::vector<RouterId>> anchors;
  for (const auto& [key, lsa] : db_) {
    if (key.second != LsaKind::kPrefix) continue;
    for (const PrefixName& p : lsa.prefixes) anchors[p].push_back(key.first);
  }
  for (const PrefixName& p : local_) anchors[p];

  routes_.clear();
  for (const auto& [p, origins] : anchors) {
    IlsRoute route;
    route.local = local_.contains(p);
    std::vector<std::size_t> at;
    at.reserve(origins.size());
    for (RouterId a : origins) at.push_back(index_of(a));
    std::size_t slot = 0;
    for (const auto& [n, l] : neighbors_) {
      const auto& dist = dist_from[slot++];
      Cost best = Cost::infinity();
      std::optional<RouterId> best_anchor;
      for (std::size_t k = 0; k < origins.size(); ++k) {
        const Cost d(dist[at[k]]);
        if (d < best || (d == best && d.is_finite() && origins[k] < *best_anchor)) {
          best = d;
          best_anchor = origins[k];
        }
      }
      const Cost via = best + l;
      if (via.is_finite()) {
        route.ranking.push_back(RankedHop{n, via});
        if (via < route.distance) {
          route.distance = via;
          route.anchor = best_anchor;
        }
      }
    }
    std::sort(route.ranking.begin(), route.ranking.end(), [](const RankedHop& x, const RankedHop& y) {
      return std::tie(x.distance, x.neighbor) < std::tie(y.distance, y.neighbor);
    });
    if (route.local) {
      route.distance = Cost(0);
      route.anchor = me_;
    }
    routes_.emplace(p, std::move(route));
  }
  return routes_;
}

RouterSnapshot IlsRouter::snapshot() const {
  RouterSnapshot s;
  s.router = me_;
  s.operations = ops_;
  for (const auto& [n, c] : neighbors_) s.neighbors.push_back(n);
  for (const auto& [p, route] : routes_) {
    RouteView v;
    v.distance = route.distance;
    v.feasible_distance = route.distance;
    v.anchor = route.anchor;
    v.local = route.local;
    if (!route.local && !route.ranking.empty()) {
      v.successor = route.ranking.front().neighbor;
      for (const RankedHop& h : route.ranking) {
        if (h.distance == route.distance) v.next_hops.push_back(h.neighbor);
      }
      std::sort(v.next_hops.begin(), v.next_hops.end());
    }
    s.routes.emplace(p, std::move(v));
  }
  return s;
}

}  // namespace dnrp
