#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boxtrace/dewey.hpp"
#include "boxtrace/engine.hpp"
#include "boxtrace/term.hpp"

namespace boxtrace {

enum class Port : std::uint8_t { call, exit, fail, redo };

std::string_view to_string(Port p);
// Throws TraceFormatError on an unknown name.
Port parse_port(std::string_view text);
Port port_of(RuleId r);

// One line of the actual trace: `chrono node depth port goal`.
struct TraceEvent {
  std::uint64_t chrono = 0;
  // Creation number of the subject node.
  std::uint64_t node = 0;
  // Number of nodes on the path from the root to the subject node.
  std::uint64_t depth = 0;
  Port port = Port::call;
  Term goal = Term::atom("true");

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// Same event up to a consistent renaming of the goal's variables.
bool alpha_equivalent(const TraceEvent& a, const TraceEvent& b);

// lp: path length plus one, so the root has depth 1.
inline std::uint64_t lpath(const DeweyPath& v) { return v.length() + 1; }

// The extraction function on one transition (rule, pre, post). The subject
// is pre.u, or gcp(pre.u) for the Redo rules; Exit events carry the updated
// predication, all others the label of the subject before the step.
TraceEvent extract(RuleId r, const VirtualState& pre, const VirtualState& post,
                   std::uint64_t chrono);

// Same event from a step record and the state it reached, without a copy
// of the previous state.
TraceEvent extract(const StepRecord& step, const VirtualState& post);

// The event the engine's next step will produce, evaluated on the current
// state: the rule's subject, and pud(u) for Exit. nullopt when terminal.
std::optional<TraceEvent> peek_event(const Engine& engine);

// Runs `prog` and returns its actual trace.
struct ExtractedTrace {
  std::vector<TraceEvent> events;
  std::vector<RuleId> rules;
  std::vector<Term> answers;
  RunStatus status = RunStatus::terminal;
};
ExtractedTrace extract_trace(const Program& prog, const RunLimits& limits = {});

enum class TraceFormat { text, jsonl };

// `pretty` pads columns like a tracer listing; the parser accepts either.
std::string render_event(const TraceEvent& e, bool pretty = false);
// Five whitespace-separated fields; the goal is read with trace variable
// syntax. Throws TraceFormatError.
TraceEvent parse_event(std::string_view line);

std::string render_event_json(const TraceEvent& e);
TraceEvent parse_event_json(std::string_view line);

void write_trace(std::ostream& os, const std::vector<TraceEvent>& events, TraceFormat format,
                 bool pretty = false);
// Reads one event per line, skipping blank lines and `%` comment lines.
// Errors carry the 1-based line number.
std::vector<TraceEvent> read_trace(std::istream& is, TraceFormat format);

}  // namespace boxtrace
