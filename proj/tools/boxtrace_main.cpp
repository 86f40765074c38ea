// boxtrace: run pure Prolog programs under the box model, print their traces,
// rebuild proof trees from stored traces and check faithfulness.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "boxtrace/error.hpp"
#include "boxtrace/harness.hpp"
#include "boxtrace/program.hpp"
#include "boxtrace/rebuild.hpp"
#include "boxtrace/trace.hpp"
#include "json.hpp"

namespace {

using namespace boxtrace;

constexpr int kPass = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

// Usage, file and format problems; main maps these to exit status 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError(path + ": cannot open file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program load_program(const std::string& path) {
  const std::string text = slurp(path);
  try {
    return parse_program(text);
  } catch (const ParseError& e) {
    throw InputError(path + ":" + e.what());
  }
}

std::vector<TraceEvent> load_trace(const std::string& path, TraceFormat format) {
  std::istringstream in(slurp(path));
  try {
    return read_trace(in, format);
  } catch (const TraceFormatError& e) {
    throw InputError(path + ": " + e.what());
  }
}

struct Options {
  std::string program;
  std::string trace_file;
  std::string format = "text";
  bool pretty = false;
  bool json = false;
  bool rules = false;
  bool check_depth = false;
  std::size_t max_steps = 100000;
  std::size_t max_solutions = 0;
  std::uint64_t seed = 1;
  std::size_t count = 100;
  unsigned threads = 1;

  TraceFormat trace_format() const {
    return format == "jsonl" ? TraceFormat::jsonl : TraceFormat::text;
  }
  RunLimits limits() const {
    RunLimits l;
    l.max_steps = max_steps;
    if (max_solutions > 0) {
      l.max_solutions = max_solutions;
    }
    return l;
  }
};

int cmd_trace(const Options& o) {
  const Program prog = load_program(o.program);
  const ExtractedTrace t = extract_trace(prog, o.limits());
  write_trace(std::cout, t.events, o.trace_format(), o.pretty);
  if (t.status != RunStatus::terminal) {
    std::cerr << "boxtrace: stopped at " << to_string(t.status) << " after " << t.events.size()
              << " events\n";
  }
  return kPass;
}

int cmd_rebuild(const Options& o) {
  const std::vector<TraceEvent> events = load_trace(o.trace_file, o.trace_format());
  if (events.empty()) {
    return kPass;
  }
  RestrictedState q0 = RestrictedState::initial(Term::atom("true"));
  try {
    q0 = initial_state_from(events);
  } catch (const RebuildError& e) {
    std::cerr << "boxtrace: " << e.what() << '\n';
    return kFailure;
  }
  const RebuildResult r = rebuild(q0, events);
  const RestrictedState& last = r.steps.empty() ? q0 : r.steps.back().second;
  if (o.json) {
    nlohmann::ordered_json j;
    j["rules"] = nlohmann::json::array();
    for (const auto& [rule, q] : r.steps) {
      j["rules"].push_back(std::string(to_string(rule)));
    }
    j["tree"] = nlohmann::json::parse(tree_to_json(last));
    j["outcome"] = std::string(to_string(outcome_of(events)));
    j["error"] = r.error ? nlohmann::json(r.error->what()) : nlohmann::json(nullptr);
    std::cout << j.dump() << '\n';
  } else {
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
      std::cout << events[i].chrono << ' ' << to_string(r.steps[i].first) << '\n';
    }
    std::cout << "tree:\n" << render_tree(last);
    std::cout << "outcome: " << to_string(outcome_of(events)) << '\n';
  }
  int status = kPass;
  if (r.error) {
    std::cerr << "boxtrace: " << r.error->what()
              << (r.error->truncated() ? " (truncated trace)" : "") << '\n';
    status = kFailure;
  }
  if (o.check_depth && !r.error) {
    if (auto bad = first_depth_mismatch(q0, events)) {
      std::cerr << "boxtrace: event " << *bad << ": depth does not match the rebuilt tree\n";
      status = kFailure;
    }
  }
  return status;
}

int cmd_check(const Options& o) {
  const Program prog = load_program(o.program);
  CheckLimits limits;
  limits.run = o.limits();
  const FaithfulnessReport r = o.trace_file.empty()
                                   ? check_faithfulness(prog, limits)
                                   : check_trace(prog, load_trace(o.trace_file, o.trace_format()),
                                                 limits);
  if (o.json) {
    std::cout << report_to_json(r) << '\n';
  } else {
    std::cout << render_report(r);
  }
  if (o.rules) {
    for (std::size_t i = 0; i < r.rules.size(); ++i) {
      std::cout << i + 1 << ' ' << to_string(r.rules[i]) << '\n';
    }
  }
  return r.verdict == Verdict::fail ? kFailure : kPass;
}

int cmd_fuzz(const Options& o) {
  CheckLimits limits;
  limits.run = o.limits();
  const SuiteSummary s = run_suite(o.seed, o.count, limits, o.threads);
  if (o.json) {
    nlohmann::ordered_json j;
    j["programs"] = s.programs;
    j["passed"] = s.passed;
    j["limit_hit"] = s.limit_hit;
    j["failed"] = s.failed;
    j["steps"] = s.steps;
    j["determinism_violations"] = s.determinism_violations;
    j["answers_compared"] = s.answers_compared;
    j["answer_mismatches"] = s.answer_mismatches;
    j["answers_skipped"] = s.answers_skipped;
    j["failing_seeds"] = s.failing_seeds;
    std::cout << j.dump() << '\n';
  } else {
    std::cout << s.programs << " programs: " << s.passed << " pass, " << s.limit_hit
              << " limit-hit, " << s.failed << " fail; " << s.steps << " steps checked\n"
              << "answers: " << s.answers_compared << " compared, " << s.answer_mismatches
              << " mismatched, " << s.answers_skipped << " skipped\n"
              << "determinism violations: " << s.determinism_violations << '\n';
    for (std::uint64_t seed : s.failing_seeds) {
      std::cout << "failing seed " << seed << '\n';
    }
  }
  return s.failed == 0 ? kPass : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Box model tracer, trace rebuilder and faithfulness checker"};
  app.require_subcommand(1);
  Options o;

  auto add_limits = [&o](CLI::App* sub) {
    sub->add_option("--max-steps", o.max_steps, "Stop after this many steps")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-solutions", o.max_solutions, "Stop after this many answers (0: all)");
  };
  auto add_format = [&o](CLI::App* sub) {
    sub->add_option("--format", o.format, "Trace format")
        ->capture_default_str()
        ->check(CLI::IsMember({"text", "jsonl"}));
  };

  CLI::App* trace = app.add_subcommand("trace", "Print the trace of a program");
  trace->add_option("program", o.program, "Program file")->required();
  add_format(trace);
  add_limits(trace);
  trace->add_flag("--pretty", o.pretty, "Align columns");

  CLI::App* rebuild_cmd = app.add_subcommand("rebuild", "Rebuild the proof tree from a trace file");
  rebuild_cmd->add_option("trace", o.trace_file, "Trace file")->required();
  add_format(rebuild_cmd);
  rebuild_cmd->add_flag("--json", o.json, "Print one JSON object");
  rebuild_cmd->add_flag("--check-depth", o.check_depth,
                        "Also fail when a depth field disagrees with the rebuilt tree");

  CLI::App* check = app.add_subcommand("check", "Check that the trace of a program is faithful");
  check->add_option("program", o.program, "Program file")->required();
  check->add_option("--trace", o.trace_file, "Check this trace instead of the extracted one");
  add_format(check);
  add_limits(check);
  check->add_flag("--json", o.json, "Print the report as JSON");
  check->add_flag("--rules", o.rules, "List the rule applied at each step");

  CLI::App* gen = app.add_subcommand("gen", "Print the generated program for a seed");
  gen->add_option("--seed", o.seed, "Seed")->capture_default_str();

  CLI::App* fuzz = app.add_subcommand("fuzz", "Check generated programs");
  fuzz->add_option("--seed", o.seed, "First seed")->capture_default_str();
  fuzz->add_option("--count", o.count, "Number of programs")->capture_default_str();
  fuzz->add_option("--threads", o.threads, "Worker threads (0: one per core)")
      ->capture_default_str();
  add_limits(fuzz);
  fuzz->add_flag("--json", o.json, "Print the summary as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kUsage;
  }

  try {
    if (trace->parsed()) {
      return cmd_trace(o);
    }
    if (rebuild_cmd->parsed()) {
      return cmd_rebuild(o);
    }
    if (check->parsed()) {
      return cmd_check(o);
    }
    if (gen->parsed()) {
      std::cout << render_program(gen_program(suite_params(o.seed)));
      return kPass;
    }
    return cmd_fuzz(o);
  } catch (const InputError& e) {
    std::cerr << "boxtrace: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "boxtrace: " << e.what() << '\n';
    return kFailure;
  }
}
