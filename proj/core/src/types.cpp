#include "dnrp/types.hpp"

#include <deque>
#include <sstream>

namespace dnrp {

std::ostream& operator<<(std::ostream& os, RouterId id) { return os << id.value; }

std::ostream& operator<<(std::ostream& os, const PrefixName& p) { return os << p.str(); }

std::ostream& operator<<(std::ostream& os, Cost c) {
  if (c.is_infinite()) return os << "inf";
  return os << c.value();
}

std::string to_string(Cost c) {
  std::ostringstream os;
  os << c;
  return os.str();
}

std::string_view to_string(UpdateKind k) {
  switch (k) {
    case UpdateKind::kUpdate:
      return "UPDATE";
    case UpdateKind::kQuery:
      return "QUERY";
    case UpdateKind::kReply:
      return "REPLY";
  }
  return "?";
}

std::string_view to_string(LsaKind k) {
  return k == LsaKind::kAdjacency ? "ADJ_LSA" : "PREFIX_LSA";
}

void Topology::add_router(RouterId id) { routers_.insert(id); }

void Topology::add_link(RouterId a, RouterId b, Cost cost, std::uint64_t delay) {
  if (a == b) throw TopologyError("self link at router " + std::to_string(a.value));
  if (!has_router(a) || !has_router(b)) throw TopologyError("link references unknown router");
  if (cost.is_infinite() || cost.value() == 0) throw TopologyError("link cost must be finite and positive");
  if (delay == 0) throw TopologyError("link delay must be positive");
  const auto [it, inserted] = links_.emplace(LinkKey(a, b), LinkSpec{cost, delay});
  if (!inserted) {
    throw TopologyError("duplicate link " + std::to_string(a.value) + "-" + std::to_string(b.value));
  }
}

void Topology::remove_link(RouterId a, RouterId b) {
  if (links_.erase(LinkKey(a, b)) == 0) throw TopologyError("no such link");
}

void Topology::set_cost(RouterId a, RouterId b, Cost cost) {
  auto it = links_.find(LinkKey(a, b));
  if (it == links_.end()) throw TopologyError("no such link");
  if (cost.is_infinite() || cost.value() == 0) throw TopologyError("link cost must be finite and positive");
  it->second.cost = cost;
}

const LinkSpec& Topology::link(RouterId a, RouterId b) const {
  auto it = links_.find(LinkKey(a, b));
  if (it == links_.end()) throw TopologyError("no such link");
  return it->second;
}

void Topology::add_anchor(const PrefixName& p, RouterId r) {
  if (!has_router(r)) throw TopologyError("anchor at unknown router " + std::to_string(r.value));
  anchors_[p].insert(r);
}

void Topology::remove_anchor(const PrefixName& p, RouterId r) {
  auto it = anchors_.find(p);
  if (it == anchors_.end() || it->second.erase(r) == 0) throw TopologyError("router is not an anchor of " + p.str());
  if (it->second.empty()) anchors_.erase(it);
}

std::set<RouterId> Topology::anchors_of(const PrefixName& p) const {
  auto it = anchors_.find(p);
  return it == anchors_.end() ? std::set<RouterId>{} : it->second;
}

std::vector<std::pair<RouterId, Cost>> Topology::neighbors(RouterId id) const {
  std::vector<std::pair<RouterId, Cost>> out;
  for (const auto& [key, spec] : links_) {
    if (key.a == id) out.emplace_back(key.b, spec.cost);
    else if (key.b == id) out.emplace_back(key.a, spec.cost);
  }
  return out;
}

bool Topology::connected() const {
  if (routers_.empty()) return true;
  std::map<RouterId, std::vector<RouterId>> adj;
  for (const auto& [key, spec] : links_) {
    adj[key.a].push_back(key.b);
    adj[key.b].push_back(key.a);
  }
  std::set<RouterId> seen{*routers_.begin()};
  std::deque<RouterId> q{*routers_.begin()};
  while (!q.empty()) {
    const RouterId u = q.front();
    q.pop_front();
    for (RouterId v : adj[u]) {
      if (seen.insert(v).second) q.push_back(v);
    }
  }
  return seen.size() == routers_.size();
}

RouterId sender_of(const Message& m) {
  return std::visit([](const auto& x) { return x.from; }, m);
}

RouterId receiver_of(const Message& m) {
  return std::visit([](const auto& x) { return x.to; }, m);
}

}  // namespace dnrp
