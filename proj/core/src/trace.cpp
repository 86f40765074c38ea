#include "boxtrace/trace.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "boxtrace/error.hpp"
#include "boxtrace/program.hpp"
#include "json.hpp"

namespace boxtrace {

namespace {

constexpr std::array<std::string_view, 4> kPortNames = {"Call", "Exit", "Fail", "Redo"};

bool is_redo(RuleId r) { return r == RuleId::redo1 || r == RuleId::redo2; }

std::uint64_t parse_count(std::string_view field, const char* what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || p != field.data() + field.size() || v == 0) {
    throw TraceFormatError(std::string("bad ") + what + " field '" + std::string(field) + "'");
  }
  return v;
}

Term parse_goal(std::string_view text) {
  try {
    Term t = parse_term(text, VariableSyntax::trace);
    if (!is_predication(t)) {
      throw TraceFormatError("goal '" + std::string(text) + "' is not a predication");
    }
    return t;
  } catch (const ParseError& e) {
    throw TraceFormatError("bad goal '" + std::string(text) + "': " + e.what());
  }
}

}  // namespace

std::string_view to_string(Port p) { return kPortNames[static_cast<std::size_t>(p)]; }

Port parse_port(std::string_view text) {
  for (std::size_t i = 0; i < kPortNames.size(); ++i) {
    if (kPortNames[i] == text) {
      return static_cast<Port>(i);
    }
  }
  throw TraceFormatError("unknown port '" + std::string(text) + "'");
}

Port port_of(RuleId r) {
  switch (r) {
    case RuleId::call1:
    case RuleId::call2:
      return Port::call;
    case RuleId::exit1:
    case RuleId::exit2:
      return Port::exit;
    case RuleId::fail2:
      return Port::fail;
    case RuleId::redo1:
    case RuleId::redo2:
      return Port::redo;
  }
  return Port::call;
}

bool alpha_equivalent(const TraceEvent& a, const TraceEvent& b) {
  return a.chrono == b.chrono && a.node == b.node && a.depth == b.depth && a.port == b.port &&
         alpha_equivalent(a.goal, b.goal);
}

TraceEvent extract(RuleId r, const VirtualState& pre, const VirtualState& post,
                   std::uint64_t chrono) {
  DeweyPath subject = pre.current();
  if (is_redo(r)) {
    auto v = pre.greatest_choice_point(subject);
    if (!v) {
      throw PreconditionError("Redo step without a choice point");
    }
    subject = *v;
  }
  const Port port = port_of(r);
  const Term& goal = port == Port::exit ? post.pred(subject) : pre.pred(subject);
  return TraceEvent{chrono, pre.num(subject), lpath(subject), port, goal};
}

TraceEvent extract(const StepRecord& step, const VirtualState& post) {
  const NodeLabels& lab = post.labels(step.subject);
  return TraceEvent{step.chrono, lab.num, lpath(step.subject), port_of(step.rule), lab.pred};
}

std::optional<TraceEvent> peek_event(const Engine& engine) {
  const auto rule = engine.select_rule();
  if (!rule) {
    return std::nullopt;
  }
  const VirtualState& s = engine.state();
  DeweyPath subject = s.current();
  if (is_redo(*rule)) {
    subject = *s.greatest_choice_point(subject);
  }
  const Port port = port_of(*rule);
  Term goal = port == Port::exit ? engine.pred_update(subject) : s.pred(subject);
  return TraceEvent{engine.steps_taken() + 1, s.num(subject), lpath(subject), port,
                    std::move(goal)};
}

ExtractedTrace extract_trace(const Program& prog, const RunLimits& limits) {
  Engine engine(prog);
  ExtractedTrace out;
  for (;;) {
    if (engine.steps_taken() >= limits.max_steps) {
      out.status = engine.select_rule() ? RunStatus::step_limit : RunStatus::terminal;
      break;
    }
    auto rec = engine.step();
    if (!rec) {
      out.status = RunStatus::terminal;
      break;
    }
    out.events.push_back(extract(*rec, engine.state()));
    out.rules.push_back(rec->rule);
    if (written_term_size(engine.state(), *rec) > limits.max_term_size) {
      out.status = engine.select_rule() ? RunStatus::term_limit : RunStatus::terminal;
      break;
    }
    if (limits.max_solutions && engine.answers().size() >= *limits.max_solutions) {
      out.status = engine.select_rule() ? RunStatus::solution_limit : RunStatus::terminal;
      break;
    }
  }
  out.answers = engine.answers();
  return out;
}

std::string render_event(const TraceEvent& e, bool pretty) {
  std::ostringstream os;
  if (pretty) {
    os << std::setw(5) << e.chrono << std::setw(6) << e.node << std::setw(6) << e.depth << "    "
       << std::left << std::setw(6) << to_string(e.port) << std::right << ' ' << e.goal;
  } else {
    os << e.chrono << ' ' << e.node << ' ' << e.depth << ' ' << to_string(e.port) << ' '
       << e.goal;
  }
  return os.str();
}

TraceEvent parse_event(std::string_view line) {
  std::array<std::string_view, 4> fields;
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])) != 0) {
      ++pos;
    }
  };
  for (auto& f : fields) {
    skip_space();
    const std::size_t start = pos;
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])) == 0) {
      ++pos;
    }
    f = line.substr(start, pos - start);
    if (f.empty()) {
      throw TraceFormatError("expected 5 fields: chrono node depth port goal");
    }
  }
  skip_space();
  std::string_view goal = line.substr(pos);
  while (!goal.empty() && std::isspace(static_cast<unsigned char>(goal.back())) != 0) {
    goal.remove_suffix(1);
  }
  if (goal.empty()) {
    throw TraceFormatError("expected 5 fields: chrono node depth port goal");
  }
  return TraceEvent{parse_count(fields[0], "chrono"), parse_count(fields[1], "node"),
                    parse_count(fields[2], "depth"), parse_port(fields[3]), parse_goal(goal)};
}

std::string render_event_json(const TraceEvent& e) {
  nlohmann::ordered_json j;
  j["chrono"] = e.chrono;
  j["node"] = e.node;
  j["depth"] = e.depth;
  j["port"] = std::string(to_string(e.port));
  j["goal"] = to_string(e.goal);
  return j.dump();
}

TraceEvent parse_event_json(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw TraceFormatError(std::string("bad JSON: ") + e.what());
  }
  auto count = [&](const char* key) -> std::uint64_t {
    if (!j.contains(key) || !j[key].is_number_unsigned() || j[key].get<std::uint64_t>() == 0) {
      throw TraceFormatError(std::string("missing or bad '") + key + "'");
    }
    return j[key].get<std::uint64_t>();
  };
  auto text = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j[key].is_string()) {
      throw TraceFormatError(std::string("missing or bad '") + key + "'");
    }
    return j[key].get<std::string>();
  };
  return TraceEvent{count("chrono"), count("node"), count("depth"), parse_port(text("port")),
                    parse_goal(text("goal"))};
}

void write_trace(std::ostream& os, const std::vector<TraceEvent>& events, TraceFormat format,
                 bool pretty) {
  for (const TraceEvent& e : events) {
    os << (format == TraceFormat::jsonl ? render_event_json(e) : render_event(e, pretty)) << '\n';
  }
}

std::vector<TraceEvent> read_trace(std::istream& is, TraceFormat format) {
  std::vector<TraceEvent> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') {
      continue;
    }
    try {
      out.push_back(format == TraceFormat::jsonl ? parse_event_json(line) : parse_event(line));
    } catch (const TraceFormatError& e) {
      throw TraceFormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace boxtrace
