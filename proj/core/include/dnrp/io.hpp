#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dnrp/types.hpp"

namespace dnrp {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

using TimedEvent = std::pair<Tick, ExternalEvent>;

/// `node <id>`, `link <a> <b> <cost> [delay]`, `anchor <node> <prefix>`, `#` comments.
/// Links without a delay use `default_delay`.
Topology parse_topology(std::istream& in, const std::string& name, std::uint64_t default_delay = 1);
Topology load_topology(const std::string& path, std::uint64_t default_delay = 1);

/// `<time> linkfail|linkup|linkcost|prefixadd|prefixdel ...`, one event per line.
/// `linkup` takes `default_delay` as the link delay.
std::vector<TimedEvent> parse_events(std::istream& in, const std::string& name, std::uint64_t default_delay = 1);
std::vector<TimedEvent> load_events(const std::string& path, std::uint64_t default_delay = 1);

void write_topology(std::ostream& os, const Topology& t);
void write_events(std::ostream& os, const std::vector<TimedEvent>& events);

}  // namespace dnrp
