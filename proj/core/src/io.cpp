#include "dnrp/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace dnrp {

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line.substr(0, line.find('#')));
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

struct LineReader {
  const std::string& name;
  std::size_t line = 0;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(name, line, what); }

  std::uint64_t number(const std::string& tok, const char* what) const {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || end != tok.data() + tok.size()) fail(std::string("bad ") + what + " '" + tok + "'");
    return v;
  }

  RouterId router(const std::string& tok) const {
    const std::uint64_t v = number(tok, "router id");
    if (v > UINT32_MAX) fail("router id out of range '" + tok + "'");
    return RouterId(static_cast<std::uint32_t>(v));
  }

  Cost cost(const std::string& tok) const {
    const std::uint64_t v = number(tok, "cost");
    if (v == 0 || Cost(v).is_infinite()) fail("link cost must be finite and positive");
    return Cost(v);
  }

  void arity(const std::vector<std::string>& t, std::size_t lo, std::size_t hi) const {
    if (t.size() < lo || t.size() > hi) fail("wrong number of fields for '" + t[0] + "'");
  }
};

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return in;
}

}  // namespace

Topology parse_topology(std::istream& in, const std::string& name, std::uint64_t default_delay) {
  Topology t;
  LineReader rd{name};
  for (std::string line; std::getline(in, line);) {
    ++rd.line;
    const auto tok = tokens_of(line);
    if (tok.empty()) continue;
    try {
      if (tok[0] == "node") {
        rd.arity(tok, 2, 2);
        const RouterId id = rd.router(tok[1]);
        if (t.has_router(id)) rd.fail("duplicate node " + tok[1]);
        t.add_router(id);
      } else if (tok[0] == "link") {
        rd.arity(tok, 4, 5);
        const std::uint64_t delay = tok.size() == 5 ? rd.number(tok[4], "delay") : default_delay;
        t.add_link(rd.router(tok[1]), rd.router(tok[2]), rd.cost(tok[3]), delay);
      } else if (tok[0] == "anchor") {
        rd.arity(tok, 3, 3);
        t.add_anchor(PrefixName(tok[2]), rd.router(tok[1]));
      } else {
        rd.fail("unknown directive '" + tok[0] + "'");
      }
    } catch (const TopologyError& e) {
      rd.fail(e.what());
    }
  }
  return t;
}

Topology load_topology(const std::string& path, std::uint64_t default_delay) {
  auto in = open(path);
  return parse_topology(in, path, default_delay);
}

std::vector<TimedEvent> parse_events(std::istream& in, const std::string& name, std::uint64_t default_delay) {
  std::vector<TimedEvent> out;
  LineReader rd{name};
  for (std::string line; std::getline(in, line);) {
    ++rd.line;
    const auto tok = tokens_of(line);
    if (tok.empty()) continue;
    if (tok.size() < 2) rd.fail("expected '<time> <event> ...'");
    const Tick at = rd.number(tok[0], "time");
    const std::string& kind = tok[1];
    if (kind == "linkfail") {
      rd.arity(tok, 4, 4);
      out.emplace_back(at, LinkDown{rd.router(tok[2]), rd.router(tok[3])});
    } else if (kind == "linkup") {
      rd.arity(tok, 5, 5);
      out.emplace_back(at, LinkUp{rd.router(tok[2]), rd.router(tok[3]), rd.cost(tok[4]), default_delay});
    } else if (kind == "linkcost") {
      rd.arity(tok, 5, 5);
      out.emplace_back(at, LinkCostChange{rd.router(tok[2]), rd.router(tok[3]), rd.cost(tok[4])});
    } else if (kind == "prefixadd") {
      rd.arity(tok, 4, 4);
      out.emplace_back(at, PrefixAdd{rd.router(tok[2]), PrefixName(tok[3])});
    } else if (kind == "prefixdel") {
      rd.arity(tok, 4, 4);
      out.emplace_back(at, PrefixDelete{rd.router(tok[2]), PrefixName(tok[3])});
    } else {
      rd.fail("unknown event '" + kind + "'");
    }
  }
  return out;
}

std::vector<TimedEvent> load_events(const std::string& path, std::uint64_t default_delay) {
  auto in = open(path);
  return parse_events(in, path, default_delay);
}

void write_topology(std::ostream& os, const Topology& t) {
  for (RouterId r : t.routers()) os << "node " << r << '\n';
  for (const auto& [key, spec] : t.links()) {
    os << "link " << key.a << ' ' << key.b << ' ' << spec.cost;
    if (spec.delay != 1) os << ' ' << spec.delay;
    os << '\n';
  }
  for (const auto& [p, anchors] : t.anchors()) {
    for (RouterId a : anchors) os << "anchor " << a << ' ' << p << '\n';
  }
}

void write_events(std::ostream& os, const std::vector<TimedEvent>& events) {
  for (const auto& [at, ev] : events) {
    os << at << ' ';
    std::visit(
        [&os](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, LinkDown>) os << "linkfail " << e.a << ' ' << e.b;
          else if constexpr (std::is_same_v<T, LinkUp>) os << "linkup " << e.a << ' ' << e.b << ' ' << e.cost;
          else if constexpr (std::is_same_v<T, LinkCostChange>) os << "linkcost " << e.a << ' ' << e.b << ' ' << e.cost;
          else if constexpr (std::is_same_v<T, PrefixAdd>) os << "prefixadd " << e.router << ' ' << e.prefix;
          else os << "prefixdel " << e.router << ' ' << e.prefix;
        },
        ev);
    os << '\n';
  }
}

}  // namespace dnrp
