#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dnrp/experiment.hpp"
#include "dnrp/figure1.hpp"
#include "dnrp/io.hpp"
#include "dnrp/scenario.hpp"
#include "dnrp/simulator.hpp"
#include "dnrp/trace.hpp"
#include "dnrp/verifier.hpp"

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kViolation = 2, kNotQuiescent = 3 };

const auto kCheckModes = CLI::IsMember({"off", "checkpoints", "every-step"});

dnrp::CheckMode check_mode(const std::string& s) { return *dnrp::parse_check_mode(s); }

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

void report_violations(const std::vector<dnrp::Violation>& vs) {
  for (const dnrp::Violation& v : vs) {
    std::cout << dnrp::format_violation(v) << '\n';
    std::cerr << "  " << dnrp::describe(v) << '\n';
  }
}

struct RunArgs {
  std::string topology;
  std::string events;
  std::string protocol = "dnrp";
  std::uint64_t seed = 0;
  std::uint64_t link_delay = 1;
  std::uint64_t event_cap = 0;
  std::string check = "checkpoints";
  std::string trace_out;
  std::string csv_out;
};

int do_run(const RunArgs& a) {
  dnrp::ScenarioScript script;
  script.topology = dnrp::load_topology(a.topology, a.link_delay);
  if (!a.events.empty()) script.events = dnrp::load_events(a.events, a.link_delay);
  script.protocol = *dnrp::parse_protocol(a.protocol);
  script.seed = a.seed;
  script.link_delay = a.link_delay;

  dnrp::RunOptions opts;
  opts.check = check_mode(a.check);
  opts.record_trace = !a.trace_out.empty();
  opts.event_cap = a.event_cap;
  const dnrp::SimulationTrace t = dnrp::run_script(script, opts);

  if (!a.trace_out.empty()) write_file(a.trace_out, [&](std::ostream& os) { dnrp::write_trace(os, t.entries); });
  if (!a.csv_out.empty()) {
    dnrp::MetricsRow row;
    row.scenario = "script";
    row.protocol = script.protocol;
    row.replicas = 0;
    row.messages_by_kind = t.metrics.messages_by_kind;
    row.messages_total = t.metrics.messages_total;
    row.updates_total = t.metrics.updates_total;
    row.operations_total = t.operations;
    row.convergence_ticks = t.metrics.last_tick;
    row.quiescent = t.quiescent;
    write_file(a.csv_out, [&](std::ostream& os) { dnrp::emit_csv({row}, os); });
  }

  std::cout << "protocol " << dnrp::to_string(script.protocol) << " messages " << t.metrics.messages_total
            << " updates " << t.metrics.updates_total << " operations " << t.operations << " last-tick "
            << t.metrics.last_tick << " deliveries " << t.deliveries << (t.quiescent ? " quiescent" : " NOT-QUIESCENT")
            << '\n';
  report_violations(t.violations);
  if (!t.quiescent) {
    std::cerr << "event cap of " << t.event_cap << " deliveries reached before quiescence\n";
    return kNotQuiescent;
  }
  return t.violations.empty() ? kOk : kViolation;
}

struct ExperimentArgs {
  std::string topology;
  std::uint64_t seed = 1;
  std::vector<std::size_t> replicas{1, 2, 3, 4, 5, 6};
  std::size_t prefixes = 120;
  std::size_t anchors = 30;
  std::size_t repetitions = 10;
  std::vector<std::string> scenarios;
  std::string protocol = "both";
  std::string check = "checkpoints";
  std::string hello = "off";
  std::uint64_t hello_interval = 5;
  bool full = false;
  bool quiet = false;
  std::string csv_out;
  std::string averages_out;
};

int do_experiment(const ExperimentArgs& a) {
  dnrp::ExperimentPlan plan;
  if (!a.topology.empty()) plan.topology = dnrp::load_topology(a.topology);
  plan.generator.seed = a.seed;
  plan.seed = a.seed;
  plan.replicas = a.replicas;
  plan.prefixes = a.full ? 1200 : a.prefixes;
  plan.anchors = a.anchors;
  plan.repetitions = a.repetitions;
  if (!a.scenarios.empty()) {
    plan.scenarios.clear();
    for (const std::string& s : a.scenarios) plan.scenarios.push_back(*dnrp::parse_scenario(s));
  }
  if (a.protocol != "both") plan.protocols = {*dnrp::parse_protocol(a.protocol)};
  plan.check = check_mode(a.check);
  plan.hello_accounting = a.hello == "on";
  plan.hello_interval = a.hello_interval;

  dnrp::Progress progress;
  if (!a.quiet) progress = [](const std::string& s) { std::cerr << s << '\n'; };
  const dnrp::ExperimentResult result = dnrp::run_experiment(plan, progress);

  if (!a.csv_out.empty()) dnrp::emit_csv(result.rows, a.csv_out);
  const auto averages = dnrp::average(result.rows);
  if (!a.averages_out.empty()) {
    write_file(a.averages_out, [&](std::ostream& os) { dnrp::emit_averages_csv(averages, os); });
  }
  dnrp::emit_averages_csv(averages, std::cout);
  report_violations(result.violations);

  const bool stalled = std::any_of(result.rows.begin(), result.rows.end(), [](const auto& r) { return !r.quiescent; });
  if (!result.violations.empty()) return kViolation;
  return stalled ? kNotQuiescent : kOk;
}

int do_figure1(bool drop, dnrp::CheckMode check, const std::string& trace_out) {
  const dnrp::figure1::Result r = dnrp::figure1::replay({drop, check});
  if (!trace_out.empty()) write_file(trace_out, [&](std::ostream& os) { dnrp::write_trace(os, r.run.entries); });
  for (const auto& c : r.checkpoints) std::cout << (c.passed ? "ok    " : "FAIL  ") << c.name << '\n';
  if (r.ok()) return kOk;
  std::cout << r.diff();
  return kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for diffusive name-based routing and a link-state baseline"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one topology and event script to quiescence");
  run_cmd->add_option("--topology", run.topology, "Topology file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--events", run.events, "Event script file")->check(CLI::ExistingFile);
  run_cmd->add_option("--protocol", run.protocol, "Routing protocol")->check(CLI::IsMember({"dnrp", "ils"}));
  run_cmd->add_option("--seed", run.seed, "Seed recorded with the script");
  run_cmd->add_option("--link-delay", run.link_delay, "Delay in ticks for links without one")->check(CLI::PositiveNumber);
  run_cmd->add_option("--event-cap", run.event_cap, "Delivery cap, 0 for 50 x links x prefixes");
  run_cmd->add_option("--check", run.check, "Verification level")->check(kCheckModes);
  run_cmd->add_option("--trace-out", run.trace_out, "Write the message trace here");
  run_cmd->add_option("--csv-out", run.csv_out, "Write a one-row metrics CSV here");

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Sweep replicas and scenarios for both protocols");
  exp_cmd->add_option("--topology", exp.topology, "Topology file; generated when omitted")->check(CLI::ExistingFile);
  exp_cmd->add_option("--seed", exp.seed, "Seed for topology generation and event targets");
  exp_cmd->add_option("--replicas", exp.replicas, "Replicas per prefix, comma separated")->delimiter(',');
  exp_cmd->add_option("--prefixes", exp.prefixes, "Number of prefixes")->check(CLI::PositiveNumber);
  exp_cmd->add_option("--anchors", exp.anchors, "Number of anchor routers")->check(CLI::PositiveNumber);
  exp_cmd->add_option("--repetitions", exp.repetitions, "Repetitions per cell")->check(CLI::PositiveNumber);
  exp_cmd->add_option("--scenarios", exp.scenarios, "Scenarios, comma separated")
      ->delimiter(',')
      ->check(CLI::IsMember({"prefix-add", "prefix-del", "link-fail", "link-recover"}));
  exp_cmd->add_option("--protocol", exp.protocol, "Protocols to run")->check(CLI::IsMember({"dnrp", "ils", "both"}));
  exp_cmd->add_option("--check", exp.check, "Verification level")->check(kCheckModes);
  exp_cmd->add_option("--hello-accounting", exp.hello, "Add periodic HELLO counts to ILS")
      ->check(CLI::IsMember({"off", "on"}));
  exp_cmd->add_option("--hello-interval", exp.hello_interval, "Ticks between HELLOs per link")->check(CLI::PositiveNumber);
  exp_cmd->add_flag("--full", exp.full, "Use 1200 prefixes");
  exp_cmd->add_flag("--quiet", exp.quiet, "No progress output");
  exp_cmd->add_option("--csv-out", exp.csv_out, "Write per-run metrics CSV here");
  exp_cmd->add_option("--averages-out", exp.averages_out, "Write per-cell means CSV here");

  bool drop = false;
  std::string fig_check = "every-step";
  std::string fig_trace;
  auto* fig_cmd = app.add_subcommand("figure1", "Replay the seven-router example and check its causality");
  fig_cmd->add_flag("--drop-q-reply", drop, "Lose the REPLY from q to r");
  fig_cmd->add_option("--check", fig_check, "Verification level")->check(kCheckModes);
  fig_cmd->add_option("--trace-out", fig_trace, "Write the message trace here");

  dnrp::GeneratorOptions gen;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("generate", "Write a preferential-attachment topology");
  gen_cmd->add_option("--nodes", gen.nodes, "Routers");
  gen_cmd->add_option("--links", gen.links, "Links");
  gen_cmd->add_option("--seed", gen.seed, "Seed");
  gen_cmd->add_option("--out", gen_out, "Output file, stdout when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return do_run(run);
    if (*exp_cmd) return do_experiment(exp);
    if (*fig_cmd) return do_figure1(drop, check_mode(fig_check), fig_trace);
    if (*gen_cmd) {
      const dnrp::Topology t = dnrp::generate_topology(gen);
      if (gen_out.empty()) dnrp::write_topology(std::cout, t);
      else write_file(gen_out, [&](std::ostream& os) { dnrp::write_topology(os, t); });
      return kOk;
    }
  } catch (const dnrp::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const dnrp::ScriptError& e) {
    std::cerr << "script error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kViolation;
  }
  return kUsage;
}
