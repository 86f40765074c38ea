#include "boxtrace/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "boxtrace/error.hpp"
#include "boxtrace/rebuild.hpp"
#include "json.hpp"

namespace boxtrace {

// ---------------------------------------------------------------------------
// Reference interpreter

namespace {

// Immutable goal list; continuations share their tails.
struct GoalList {
  Term goal;
  std::shared_ptr<const GoalList> next;
};
using Goals = std::shared_ptr<const GoalList>;

class Solver {
 public:
  Solver(const Program& prog, const ReferenceCaps& caps) : prog_(prog), caps_(caps) {}

  ReferenceResult run() {
    solve(std::make_shared<const GoalList>(GoalList{prog_.goal, nullptr}), 0);
    return ReferenceResult{std::move(answers_), capped_};
  }

 private:
  void solve(const Goals& goals, std::size_t depth) {
    if (!goals) {
      answers_.push_back(apply_subst(prog_.goal, subst_));
      return;
    }
    if (depth >= caps_.max_depth) {
      capped_ = true;
      return;
    }
    for (const Clause& c : prog_.clauses) {
      if (++steps_ > caps_.max_steps) {
        capped_ = true;
        return;
      }
      const Clause r = rename_apart(c, counter_++);
      const Substitution::Mark m = subst_.mark();
      if (unify_in_place(goals->goal, r.head, subst_)) {
        Goals rest = goals->next;
        for (auto it = r.body.rbegin(); it != r.body.rend(); ++it) {
          rest = std::make_shared<const GoalList>(GoalList{*it, std::move(rest)});
        }
        solve(rest, depth + 1);
        subst_.undo_to(m);
      }
      if (capped_) {
        return;
      }
    }
  }

  const Program& prog_;
  ReferenceCaps caps_;
  Substitution subst_;
  std::uint32_t counter_ = 1;
  std::size_t steps_ = 0;
  bool capped_ = false;
  std::vector<Term> answers_;
};

}  // namespace

ReferenceResult reference_solve(const Program& prog, const ReferenceCaps& caps) {
  return Solver(prog, caps).run();
}

std::vector<std::string> answer_multiset(const std::vector<Term>& answers) {
  std::vector<std::string> out;
  out.reserve(answers.size());
  for (const Term& a : answers) {
    out.push_back(to_string(alpha_normalize(a)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Program generator

namespace {

// Draws are taken straight from the engine's output so that programs are
// the same on every standard library.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(rng_() % n); }
  bool chance(double p) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }

 private:
  std::mt19937_64 rng_;
};

constexpr std::array<const char*, 4> kVariableNames = {"X", "Y", "Z", "W"};

class Generator {
 public:
  explicit Generator(const GenParams& gp) : gp_(gp), draw_(gp.seed) {}

  Program run() {
    const std::size_t k = gp_.predicate_count;
    std::vector<std::size_t> arity(k);
    for (auto& a : arity) {
      a = draw_.below(3);
    }
    Program prog;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t clauses = 1 + draw_.below(gp_.max_clauses);
      for (std::size_t c = 0; c < clauses; ++c) {
        vars_ = 1 + draw_.below(kVariableNames.size());
        Clause cl{predication(i, arity[i]), {}, prog.clauses.size()};
        const std::size_t body = draw_.below(gp_.max_body + 1);
        for (std::size_t b = 0; b < body; ++b) {
          std::size_t callee = 0;
          if (draw_.chance(gp_.recursion_probability)) {
            callee = draw_.below(k);
          } else if (i + 1 < k) {
            callee = i + 1 + draw_.below(k - i - 1);
          } else {
            continue;
          }
          cl.body.push_back(predication(callee, arity[callee]));
        }
        prog.clauses.push_back(std::move(cl));
      }
    }
    // Mostly distinct goal variables, so that the goal has answers to find.
    vars_ = kVariableNames.size();
    std::vector<Term> args;
    for (std::size_t a = 0; a < arity[0]; ++a) {
      args.push_back(draw_.chance(0.8) ? Term::variable(kVariableNames[a])
                                       : term(gp_.max_term_depth));
    }
    prog.goal = args.empty() ? Term::atom("p0") : Term::compound("p0", std::move(args));
    return prog;
  }

 private:
  Term predication(std::size_t pred, std::size_t arity) {
    const std::string name = "p" + std::to_string(pred);
    if (arity == 0) {
      return Term::atom(name);
    }
    std::vector<Term> args;
    for (std::size_t a = 0; a < arity; ++a) {
      args.push_back(term(gp_.max_term_depth));
    }
    return Term::compound(name, std::move(args));
  }

  Term variable() { return Term::variable(kVariableNames[draw_.below(vars_)]); }

  Term term(std::size_t depth) {
    if (depth <= 1 || draw_.chance(0.6)) {
      if (draw_.chance(0.6)) {
        return variable();
      }
      return Term::atom("c" + std::to_string(draw_.below(gp_.constant_pool)));
    }
    if (draw_.chance(0.5)) {
      return Term::compound("f", {term(depth - 1)});
    }
    return Term::compound("g", {term(depth - 1), term(depth - 1)});
  }

  GenParams gp_;
  Draw draw_;
  std::size_t vars_ = 1;
};

}  // namespace

void validate(const GenParams& gp) {
  if (gp.predicate_count == 0 || gp.max_clauses == 0 || gp.max_body == 0 ||
      gp.max_term_depth == 0 || gp.constant_pool == 0) {
    throw PreconditionError("generator bounds must be at least 1");
  }
  if (!(gp.recursion_probability >= 0.0 && gp.recursion_probability <= 1.0)) {
    throw PreconditionError("recursion probability must lie in [0, 1]");
  }
}

Program gen_program(const GenParams& gp) {
  validate(gp);
  return Generator(gp).run();
}

GenParams suite_params(std::uint64_t seed) {
  Draw d(seed ^ 0x9e3779b97f4a7c15ULL);
  GenParams gp;
  gp.seed = seed;
  gp.predicate_count = 2 + d.below(5);
  gp.max_clauses = 1 + d.below(4);
  gp.max_body = 1 + d.below(3);
  gp.max_term_depth = 1 + d.below(3);
  gp.constant_pool = 1 + d.below(4);
  // A third of the programs may recurse.
  gp.recursion_probability = d.below(3) == 0 ? 0.2 : 0.0;
  return gp;
}

// ---------------------------------------------------------------------------
// Faithfulness checking

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::limit_hit:
      return "limit-hit";
  }
  return "?";
}

std::string_view to_string(AnswerCheck a) {
  switch (a) {
    case AnswerCheck::not_run:
      return "not-run";
    case AnswerCheck::skipped:
      return "skipped";
    case AnswerCheck::match:
      return "match";
    case AnswerCheck::mismatch:
      return "mismatch";
  }
  return "?";
}

std::string program_digest(const Program& prog) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : render_program(prog)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

class Checker {
 public:
  Checker(const Program& prog, const CheckLimits& limits)
      : prog_(prog), limits_(limits), engine_(prog), q_(RestrictedState::initial(prog.goal)) {
    report_.program_digest = program_digest(prog);
  }

  FaithfulnessReport run(const std::vector<TraceEvent>* supplied) {
    try {
      if (auto d = q_.difference(engine_.state())) {
        diverge(0, "initial states differ: " + *d, std::nullopt, std::nullopt);
      } else if (supplied) {
        replay(*supplied);
      } else {
        follow();
      }
    } catch (const DeterminismViolation& e) {
      report_.determinism_violation = true;
      diverge(engine_.steps_taken() + 1, e.what(), std::nullopt, std::nullopt);
    } catch (const InvariantViolation& e) {
      diverge(engine_.steps_taken() + 1, e.what(), std::nullopt, std::nullopt);
    }
    report_.engine_answers = engine_.answers();
    if (report_.verdict == Verdict::pass && report_.run_status == RunStatus::terminal &&
        limits_.compare_answers) {
      compare_answers();
    }
    return std::move(report_);
  }

 private:
  // Lockstep with the extracted trace; the next event is peeked from the
  // engine so that a capped run still has lookahead for its last step.
  void follow() {
    std::optional<TraceEvent> cur = peek_event(engine_);
    while (cur) {
      if (engine_.steps_taken() >= limits_.run.max_steps) {
        report_.run_status = RunStatus::step_limit;
        report_.verdict = Verdict::limit_hit;
        return;
      }
      const RuleId applied = *engine_.select_rule();
      const StepRecord rec = engine_.apply_rule(applied);
      TraceEvent e = extract(rec, engine_.state());
      if (!alpha_equivalent(e, *cur)) {
        diverge(e.chrono, "event extracted after the step differs from the one peeked before it",
                applied, std::nullopt);
        return;
      }
      if (written_term_size(engine_.state(), rec) > limits_.run.max_term_size) {
        // Peeking would already pay for the oversized term.
        report_.run_status = RunStatus::term_limit;
        report_.verdict = Verdict::limit_hit;
        return;
      }
      std::optional<TraceEvent> next = peek_event(engine_);
      if (!interpret(e, lookahead(next), applied)) {
        return;
      }
      if (limits_.run.max_solutions && engine_.answers().size() >= *limits_.run.max_solutions &&
          next) {
        report_.run_status = RunStatus::solution_limit;
        return;
      }
      cur = std::move(next);
    }
  }

  void replay(const std::vector<TraceEvent>& events) {
    for (std::size_t i = 0; i < events.size(); ++i) {
      const TraceEvent& e = events[i];
      if (e.chrono != i + 1) {
        diverge(e.chrono, "chrono out of sequence, expected " + std::to_string(i + 1),
                std::nullopt, std::nullopt);
        return;
      }
      const auto rule = engine_.select_rule();
      if (!rule) {
        diverge(e.chrono, "the run ended before the trace", std::nullopt, std::nullopt);
        return;
      }
      if (engine_.steps_taken() >= limits_.run.max_steps) {
        report_.run_status = RunStatus::step_limit;
        report_.verdict = Verdict::limit_hit;
        return;
      }
      const StepRecord rec = engine_.apply_rule(*rule);
      if (written_term_size(engine_.state(), rec) > limits_.run.max_term_size) {
        report_.run_status = RunStatus::term_limit;
        report_.verdict = Verdict::limit_hit;
        return;
      }
      std::optional<Lookahead> la;
      if (i + 1 < events.size()) {
        la = Lookahead{events[i + 1].node, events[i + 1].goal};
      }
      if (!interpret(e, la, *rule)) {
        return;
      }
    }
    if (engine_.select_rule()) {
      diverge(events.size() + 1, "the trace ended before the run", std::nullopt, std::nullopt);
    }
  }

  static std::optional<Lookahead> lookahead(const std::optional<TraceEvent>& next) {
    if (!next) {
      return std::nullopt;
    }
    return Lookahead{next->node, next->goal};
  }

  // Interprets e on Q and compares with the engine, which has just applied
  // `applied`. Returns false after recording a divergence.
  bool interpret(const TraceEvent& e, const std::optional<Lookahead>& la, RuleId applied) {
    RuleId classified{};
    try {
      classified = classify(q_, e, la);
    } catch (const RebuildError& err) {
      diverge(e.chrono, err.what(), applied, std::nullopt);
      return false;
    }
    if (classified != applied) {
      diverge(e.chrono, "rule mismatch", applied, classified);
      return false;
    }
    try {
      q_ = apply_event(std::move(q_), classified, e, la);
    } catch (const RebuildError& err) {
      q_valid_ = false;
      diverge(e.chrono, err.what(), applied, classified);
      return false;
    }
    if (auto d = q_.difference(engine_.state())) {
      diverge(e.chrono, *d, applied, classified);
      return false;
    }
    if (limits_.check_engine_invariants) {
      auto bad = engine_.check_invariants();
      if (!bad) {
        bad = q_.check_invariants();
      }
      if (bad) {
        diverge(e.chrono, "invariant: " + *bad, applied, classified);
        return false;
      }
    }
    ++report_.steps_checked;
    report_.rules.push_back(applied);
    return true;
  }

  void diverge(std::uint64_t chrono, std::string detail, std::optional<RuleId> expected,
               std::optional<RuleId> classified) {
    Divergence d;
    d.chrono = chrono;
    d.expected_state = render_tree(RestrictedState::restrict(engine_.state()));
    d.rebuilt_state = q_valid_ ? render_tree(q_) : "(event rejected)\n";
    d.expected_rule = expected;
    d.classified_rule = classified;
    d.detail = std::move(detail);
    report_.divergence = std::move(d);
    report_.verdict = Verdict::fail;
  }

  void compare_answers() {
    const ReferenceResult ref = reference_solve(prog_, limits_.reference);
    report_.reference_answers = ref.answers;
    if (ref.cap_exceeded) {
      report_.answers = AnswerCheck::skipped;
      return;
    }
    const bool same =
        answer_multiset(report_.engine_answers) == answer_multiset(report_.reference_answers);
    report_.answers = same ? AnswerCheck::match : AnswerCheck::mismatch;
    if (!same) {
      report_.verdict = Verdict::fail;
    }
  }

  const Program& prog_;
  CheckLimits limits_;
  Engine engine_;
  RestrictedState q_;
  bool q_valid_ = true;
  FaithfulnessReport report_;
};

}  // namespace

FaithfulnessReport check_faithfulness(const Program& prog, const CheckLimits& limits) {
  return Checker(prog, limits).run(nullptr);
}

FaithfulnessReport check_trace(const Program& prog, const std::vector<TraceEvent>& events,
                               const CheckLimits& limits) {
  return Checker(prog, limits).run(&events);
}

std::string render_report(const FaithfulnessReport& r) {
  std::ostringstream os;
  os << to_string(r.verdict) << ", " << r.steps_checked << " steps\n";
  os << "program " << r.program_digest << ", run " << to_string(r.run_status) << '\n';
  os << "answers " << to_string(r.answers) << " (engine " << r.engine_answers.size();
  if (r.answers != AnswerCheck::not_run) {
    os << ", reference " << r.reference_answers.size();
  }
  os << ")\n";
  if (r.determinism_violation) {
    os << "determinism violated\n";
  }
  if (r.divergence) {
    const Divergence& d = *r.divergence;
    os << "divergence at event " << d.chrono << ": " << d.detail << '\n';
    if (d.expected_rule) {
      os << "  applied rule    " << to_string(*d.expected_rule) << '\n';
    }
    if (d.classified_rule) {
      os << "  classified rule " << to_string(*d.classified_rule) << '\n';
    }
    os << "  engine state:\n" << d.expected_state << "  rebuilt state:\n" << d.rebuilt_state;
  }
  return os.str();
}

std::string report_to_json(const FaithfulnessReport& r) {
  nlohmann::ordered_json j;
  j["verdict"] = std::string(to_string(r.verdict));
  j["steps_checked"] = r.steps_checked;
  j["program_digest"] = r.program_digest;
  j["run_status"] = std::string(to_string(r.run_status));
  j["determinism_violation"] = r.determinism_violation;
  j["answers"] = std::string(to_string(r.answers));
  j["engine_answers"] = answer_multiset(r.engine_answers);
  j["reference_answers"] = answer_multiset(r.reference_answers);
  if (r.divergence) {
    const Divergence& d = *r.divergence;
    nlohmann::ordered_json dj;
    dj["chrono"] = d.chrono;
    dj["detail"] = d.detail;
    dj["applied_rule"] = d.expected_rule ? nlohmann::json(std::string(to_string(*d.expected_rule)))
                                         : nlohmann::json(nullptr);
    dj["classified_rule"] = d.classified_rule
                                ? nlohmann::json(std::string(to_string(*d.classified_rule)))
                                : nlohmann::json(nullptr);
    dj["engine_state"] = d.expected_state;
    dj["rebuilt_state"] = d.rebuilt_state;
    j["divergence"] = std::move(dj);
  } else {
    j["divergence"] = nullptr;
  }
  return j.dump();
}

// ---------------------------------------------------------------------------
// Suites

SuiteSummary run_suite(std::uint64_t first_seed, std::size_t count, const CheckLimits& limits,
                       unsigned threads) {
  if (threads == 0) {
    threads = std::max(1U, std::thread::hardware_concurrency());
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  SuiteSummary total;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    SuiteSummary mine;
    for (std::size_t i = next++; i < count; i = next++) {
      const std::uint64_t seed = first_seed + i;
      const FaithfulnessReport r = check_faithfulness(gen_program(suite_params(seed)), limits);
      ++mine.programs;
      mine.steps += r.steps_checked;
      mine.determinism_violations += r.determinism_violation ? 1 : 0;
      switch (r.answers) {
        case AnswerCheck::match:
          ++mine.answers_compared;
          break;
        case AnswerCheck::mismatch:
          ++mine.answers_compared;
          ++mine.answer_mismatches;
          break;
        case AnswerCheck::skipped:
          ++mine.answers_skipped;
          break;
        case AnswerCheck::not_run:
          break;
      }
      switch (r.verdict) {
        case Verdict::pass:
          ++mine.passed;
          break;
        case Verdict::limit_hit:
          ++mine.limit_hit;
          break;
        case Verdict::fail:
          ++mine.failed;
          mine.failing_seeds.push_back(seed);
          break;
      }
    }
    std::lock_guard lock(mu);
    total.programs += mine.programs;
    total.passed += mine.passed;
    total.limit_hit += mine.limit_hit;
    total.failed += mine.failed;
    total.steps += mine.steps;
    total.determinism_violations += mine.determinism_violations;
    total.answers_compared += mine.answers_compared;
    total.answer_mismatches += mine.answer_mismatches;
    total.answers_skipped += mine.answers_skipped;
    total.failing_seeds.insert(total.failing_seeds.end(), mine.failing_seeds.begin(),
                               mine.failing_seeds.end());
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }
  std::sort(total.failing_seeds.begin(), total.failing_seeds.end());
  return total;
}

}  // namespace boxtrace
