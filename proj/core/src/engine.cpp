#include "boxtrace/engine.hpp"

#include <algorithm>
#include <unordered_set>

#include "boxtrace/error.hpp"

namespace boxtrace {

namespace {

constexpr std::array<std::string_view, 7> kRuleNames = {"Call1", "Call2", "Exit1", "Exit2",
                                                        "Fail2", "Redo1", "Redo2"};

const Substitution& empty_substitution() {
  static const Substitution empty;
  return empty;
}

}  // namespace

std::string_view to_string(RuleId r) { return kRuleNames[static_cast<std::size_t>(r)]; }

RuleId parse_rule_id(std::string_view text) {
  for (std::size_t i = 0; i < kRuleNames.size(); ++i) {
    if (kRuleNames[i] == text) {
      return static_cast<RuleId>(i);
    }
  }
  throw PreconditionError("unknown rule '" + std::string(text) + "'");
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::terminal:
      return "terminal";
    case RunStatus::step_limit:
      return "step-limit";
    case RunStatus::solution_limit:
      return "solution-limit";
    case RunStatus::term_limit:
      return "term-limit";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// VirtualState

VirtualState VirtualState::initial(const Program& prog) {
  VirtualState s;
  s.add_node(DeweyPath::root(),
             NodeLabels{1, prog.goal, useful_clauses(prog.goal, prog, empty_substitution()), true});
  s.last_number_ = 1;
  return s;
}

VirtualState::VirtualState(const VirtualState& other)
    : nodes_(other.nodes_),
      current_(other.current_),
      last_number_(other.last_number_),
      completed_(other.completed_),
      failed_(other.failed_),
      choice_points_(other.choice_points_) {
  index_.reserve(nodes_.size());
  for (auto it = nodes_.begin(); it != nodes_.end(); ++it) {
    index_.emplace(it->first, it);
  }
}

VirtualState& VirtualState::operator=(const VirtualState& other) {
  if (this != &other) {
    VirtualState copy(other);
    *this = std::move(copy);
  }
  return *this;
}

const NodeLabels& VirtualState::labels(const DeweyPath& v) const {
  auto it = index_.find(v);
  if (it == index_.end()) {
    throw PreconditionError("node " + v.to_string() + " is not in the tree");
  }
  return it->second->second;
}

NodeLabels& VirtualState::mutable_labels(const DeweyPath& v) {
  return const_cast<NodeLabels&>(labels(v));
}

bool VirtualState::is_leaf(const DeweyPath& v) const { return !contains(v.child(1)); }

std::size_t VirtualState::child_count(const DeweyPath& v) const {
  std::size_t k = 0;
  while (contains(v.child(static_cast<std::uint32_t>(k + 1)))) {
    ++k;
  }
  return k;
}

DeweyPath VirtualState::new_child_path(const DeweyPath& v) const {
  if (!contains(v)) {
    throw PreconditionError("node " + v.to_string() + " is not in the tree");
  }
  return v.child(static_cast<std::uint32_t>(child_count(v) + 1));
}

std::optional<DeweyPath> VirtualState::greatest_choice_point(const DeweyPath& u) const {
  // The subtree of u is the contiguous range [u, next brother of u).
  auto it = u.is_root() ? choice_points_.end() : choice_points_.lower_bound(u.next_brother());
  if (it == choice_points_.begin()) {
    return std::nullopt;
  }
  --it;
  if (!u.is_ancestor_or_self_of(*it)) {
    return std::nullopt;
  }
  return *it;
}

bool VirtualState::first_clause_is_fact(const Program& prog, const DeweyPath& v) const {
  const auto& cl = claus(v);
  if (cl.empty()) {
    throw PreconditionError("node " + v.to_string() + " has no clause left");
  }
  return prog.clauses.at(cl.front()).is_fact();
}

void VirtualState::add_node(const DeweyPath& v, NodeLabels labels) {
  last_number_ = std::max(last_number_, labels.num);
  auto [it, inserted] = nodes_.insert_or_assign(v, std::move(labels));
  index_.insert_or_assign(v, it);
  sync_choice_point(v);
}

std::size_t VirtualState::pop_clause(const DeweyPath& v) {
  auto it = index_.find(v);
  if (it == index_.end() || it->second->second.claus.empty()) {
    throw InvariantViolation("pop_clause at " + v.to_string() + " with no clause left");
  }
  auto& cl = it->second->second.claus;
  const std::size_t c = cl.front();
  cl.erase(cl.begin());
  sync_choice_point(v);
  return c;
}

std::vector<DeweyPath> VirtualState::remove_after(const DeweyPath& v) {
  std::vector<DeweyPath> removed;
  auto it = nodes_.upper_bound(v);
  for (auto k = it; k != nodes_.end(); ++k) {
    removed.push_back(k->first);
    index_.erase(k->first);
  }
  nodes_.erase(it, nodes_.end());
  choice_points_.erase(choice_points_.upper_bound(v), choice_points_.end());
  return removed;
}

void VirtualState::sync_choice_point(const DeweyPath& v) {
  auto it = index_.find(v);
  if (it != index_.end() && !it->second->second.claus.empty()) {
    choice_points_.insert(v);
  } else {
    choice_points_.erase(v);
  }
}

// ---------------------------------------------------------------------------
// GuardSet

std::size_t GuardSet::count() const {
  return static_cast<std::size_t>(std::count(holds.begin(), holds.end(), true));
}

std::vector<RuleId> GuardSet::applicable() const {
  std::vector<RuleId> out;
  for (RuleId r : kAllRules) {
    if ((*this)[r]) {
      out.push_back(r);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Engine

Engine::Engine(const Program& prog) : prog_(&prog), state_(VirtualState::initial(prog)) {
  books_.emplace(DeweyPath::root(), NodeBook{prog.goal, std::nullopt, 0, false});
}

const NodeBook& Engine::book(const DeweyPath& v) const {
  auto it = books_.find(v);
  if (it == books_.end()) {
    throw PreconditionError("node " + v.to_string() + " is not in the tree");
  }
  return it->second;
}

bool Engine::may_have_new_brother(const DeweyPath& u) const {
  if (u.is_root()) {
    return false;
  }
  const auto& clause = book(u.parent()).current_clause;
  return clause.has_value() && u.last() < clause->body.size();
}

bool Engine::success(const DeweyPath& u) const { return book(u).solved; }

bool Engine::node_failed(const DeweyPath& u) const {
  return state_.is_leaf(u) && !state_.first(u) && !book(u).current_clause.has_value();
}

Term Engine::pred_update(const DeweyPath& u) const { return apply_subst(book(u).call_pred, subst_); }

GuardSet Engine::guards() const {
  const DeweyPath& u = state_.current();
  const NodeLabels& lab = state_.labels(u);
  const bool fst = lab.first;
  const bool ct = state_.completed();
  const bool flr = state_.failed();

  GuardSet g;
  auto set = [&g](RuleId r, bool v) { g.holds[static_cast<std::size_t>(r)] = v; };

  if (fst) {
    const bool lf = state_.is_leaf(u);
    // An empty clause list makes ft undefined; such a call behaves like
    // Call1 and fails on the next step.
    const bool degenerate = lab.claus.empty();
    const bool ft = !degenerate && state_.first_clause_is_fact(*prog_, u);
    set(RuleId::call1, lf && !ct && (degenerate || ft));
    set(RuleId::call2, lf && !ct && !degenerate && !ft);
    return g;
  }

  const bool mhnb = may_have_new_brother(u);
  const bool scs = success(u);
  set(RuleId::exit1, !mhnb && !ct && !flr && scs);
  set(RuleId::exit2, mhnb && !ct && !flr && scs);

  const auto gcp = state_.greatest_choice_point(u);
  const bool hcp = gcp.has_value();
  set(RuleId::fail2, !ct && !hcp && (node_failed(u) || flr));
  if (hcp && (flr || ct)) {
    const bool ft = state_.first_clause_is_fact(*prog_, *gcp);
    set(RuleId::redo1, ft);
    set(RuleId::redo2, !ft);
  }
  return g;
}

bool Engine::terminal() const {
  return state_.completed() && !state_.has_choice_point(state_.current()) &&
         guards().count() == 0;
}

std::optional<RuleId> Engine::select_rule() const {
  const GuardSet g = guards();
  const std::size_t n = g.count();
  if (n == 1) {
    return g.applicable().front();
  }
  if (n > 1) {
    std::string names;
    for (RuleId r : g.applicable()) {
      names += names.empty() ? "" : ", ";
      names += to_string(r);
    }
    throw DeterminismViolation("several rules apply at node " +
                               state_.current().to_string() + ": " + names);
  }
  if (state_.completed() && !state_.has_choice_point(state_.current())) {
    return std::nullopt;
  }
  throw InvariantViolation("no rule applies at node " + state_.current().to_string() +
                           " although the search is not finished");
}

StepRecord Engine::apply_rule(RuleId r) {
  if (!guards()[r]) {
    throw PreconditionError(std::string("rule ") + std::string(to_string(r)) +
                            " does not apply at node " + state_.current().to_string());
  }
  StepRecord rec;
  apply_unchecked(r, rec);
  return rec;
}

std::optional<StepRecord> Engine::step() {
  const auto r = select_rule();
  if (!r) {
    return std::nullopt;
  }
  StepRecord rec;
  apply_unchecked(*r, rec);
  return rec;
}

void Engine::apply_unchecked(RuleId r, StepRecord& rec) {
  const DeweyPath u = state_.current();
  rec.chrono = ++steps_;
  rec.rule = r;
  rec.pre_current = u;
  rec.subject = u;

  switch (r) {
    case RuleId::call1: {
      auto& lab = state_.mutable_labels(u);
      if (!lab.claus.empty()) {
        consume_clause(u);
        books_.at(u).solved = true;
      }
      lab.first = false;
      state_.failed_ = false;
      break;
    }
    case RuleId::call2: {
      consume_clause(u);
      state_.mutable_labels(u).first = false;
      const DeweyPath v = state_.new_child_path(u);
      create_node(v);
      state_.current_ = v;
      state_.failed_ = false;
      break;
    }
    case RuleId::exit1: {
      Term p = pred_update(u);
      state_.mutable_labels(u).pred = p;
      if (u.is_root()) {
        state_.completed_ = true;
        answers_.push_back(std::move(p));
      } else {
        state_.current_ = u.parent();
        books_.at(state_.current_).solved = true;
      }
      break;
    }
    case RuleId::exit2: {
      state_.mutable_labels(u).pred = pred_update(u);
      const DeweyPath v = u.next_brother();
      create_node(v);
      state_.current_ = v;
      break;
    }
    case RuleId::fail2: {
      state_.current_ = u.parent();
      state_.failed_ = true;
      if (u.is_root()) {
        state_.completed_ = true;
      }
      break;
    }
    case RuleId::redo1:
    case RuleId::redo2: {
      const auto gcp = state_.greatest_choice_point(u);
      if (!gcp) {
        throw InvariantViolation("redo without a choice point under " + u.to_string());
      }
      const DeweyPath v = *gcp;
      rec.subject = v;
      prune(v);
      const Clause& c = consume_clause(v);
      if (r == RuleId::redo1) {
        books_.at(v).solved = c.is_fact();
        state_.current_ = v;
      } else {
        const DeweyPath w = state_.new_child_path(v);
        create_node(w);
        state_.current_ = w;
      }
      state_.failed_ = false;
      state_.completed_ = false;
      break;
    }
  }
}

std::pair<std::vector<std::size_t>, Term> Engine::claus_pred_init(const DeweyPath& v) const {
  if (v.is_root()) {
    throw PreconditionError("the root is initialised from the goal");
  }
  const auto& clause = book(v.parent()).current_clause;
  if (!clause || v.last() > clause->body.size()) {
    throw InvariantViolation("node " + v.to_string() + " has no body goal to call");
  }
  Term goal = apply_subst(clause->body[v.last() - 1], subst_);
  auto claus = useful_clauses(goal, *prog_, empty_substitution());
  return {std::move(claus), std::move(goal)};
}

void Engine::create_node(const DeweyPath& v) {
  auto [claus, goal] = claus_pred_init(v);
  state_.add_node(v, NodeLabels{state_.last_number_ + 1, goal, std::move(claus), true});
  books_.insert_or_assign(v, NodeBook{std::move(goal), std::nullopt, 0, false});
}

const Clause& Engine::consume_clause(const DeweyPath& u) {
  const std::size_t idx = state_.pop_clause(u);
  Clause renamed = rename_apart(prog_->clauses[idx], fresh_counter_++);
  NodeBook& b = books_.at(u);
  const auto mark = subst_.mark();
  if (!unify_in_place(b.call_pred, renamed.head, subst_)) {
    throw InvariantViolation("head of clause " + std::to_string(idx + 1) +
                             " does not unify with the call at " + u.to_string());
  }
  b.trail_mark = mark;
  b.current_clause = std::move(renamed);
  return *b.current_clause;
}

void Engine::prune(const DeweyPath& v) {
  for (const DeweyPath& y : state_.remove_after(v)) {
    books_.erase(y);
  }
  NodeBook& b = books_.at(v);
  if (!b.current_clause) {
    throw InvariantViolation("retried node " + v.to_string() + " was never resolved");
  }
  subst_.undo_to(b.trail_mark);
  b.current_clause.reset();
  b.solved = false;
  unsolve_ancestors(v);
}

void Engine::unsolve_ancestors(const DeweyPath& v) {
  DeweyPath a = v;
  while (!a.is_root()) {
    a = a.parent();
    books_.at(a).solved = false;
  }
}

bool Engine::structural_success(const DeweyPath& u) const {
  const auto& clause = book(u).current_clause;
  if (!clause) {
    return false;
  }
  const std::size_t kids = state_.child_count(u);
  if (kids != clause->body.size()) {
    return false;
  }
  for (std::size_t k = 1; k <= kids; ++k) {
    if (!structural_success(u.child(static_cast<std::uint32_t>(k)))) {
      return false;
    }
  }
  return true;
}

std::optional<std::string> Engine::check_invariants() const {
  const auto& nodes = state_.nodes();
  const DeweyPath& u = state_.current();
  if (!nodes.contains(DeweyPath::root()) || state_.num(DeweyPath::root()) != 1) {
    return "root missing or not numbered 1";
  }
  if (!nodes.contains(u)) {
    return "current node " + u.to_string() + " is not in the tree";
  }
  if (books_.size() != nodes.size()) {
    return "bookkeeping and tree have different node sets";
  }
  std::unordered_set<std::uint64_t> numbers;
  std::set<DeweyPath> choice_points;
  for (const auto& [v, lab] : nodes) {
    if (!books_.contains(v)) {
      return "node " + v.to_string() + " has no bookkeeping";
    }
    if (!v.is_root()) {
      if (!nodes.contains(v.parent())) {
        return "tree is not prefix-closed at " + v.to_string();
      }
      if (v.last() > 1 && !nodes.contains(v.parent().child(v.last() - 1))) {
        return "node " + v.to_string() + " has a missing elder brother";
      }
      const auto& clause = book(v.parent()).current_clause;
      if (!clause || v.last() > clause->body.size()) {
        return "node " + v.to_string() + " does not match a body goal of its parent";
      }
    }
    if (!numbers.insert(lab.num).second) {
      return "creation number " + std::to_string(lab.num) + " is used twice";
    }
    if (lab.num > state_.last_number()) {
      return "creation number exceeds n at " + v.to_string();
    }
    if (lab.first && (!state_.is_leaf(v) || v != u)) {
      return "unvisited node " + v.to_string() + " is not the current leaf";
    }
    if (!lab.claus.empty()) {
      choice_points.insert(v);
    }
    // The flag is refreshed lazily, when control returns to the node, so
    // only the current node must agree exactly.
    if (book(v).solved && !structural_success(v)) {
      return "stale success flag at " + v.to_string();
    }
    if (v == u && !lab.first && book(v).solved != structural_success(v)) {
      return "success flag out of date at current node " + v.to_string();
    }
  }
  if (choice_points != state_.choice_points_) {
    return "choice point index out of date";
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::uint64_t written_term_size(const VirtualState& s, const StepRecord& rec) {
  const std::uint64_t cur = s.pred(s.current()).size();
  return s.contains(rec.subject) ? std::max(cur, s.pred(rec.subject).size()) : cur;
}

RunResult run(const Program& prog, const RunOptions& options) {
  Engine engine(prog);
  RunResult out;
  out.trace.initial = engine.state();
  for (;;) {
    if (engine.steps_taken() >= options.limits.max_steps) {
      out.status = engine.select_rule() ? RunStatus::step_limit : RunStatus::terminal;
      break;
    }
    auto rec = engine.step();
    if (!rec) {
      out.status = RunStatus::terminal;
      break;
    }
    const bool too_big = written_term_size(engine.state(), *rec) > options.limits.max_term_size;
    out.trace.steps.push_back(std::move(*rec));
    if (options.record_states) {
      out.trace.states.push_back(engine.state());
    }
    if (options.check_invariants) {
      if (auto bad = engine.check_invariants()) {
        throw InvariantViolation("after step " + std::to_string(engine.steps_taken()) + ": " +
                                 *bad);
      }
    }
    if (too_big) {
      out.status = engine.select_rule() ? RunStatus::term_limit : RunStatus::terminal;
      break;
    }
    const auto& limit = options.limits.max_solutions;
    if (limit && engine.answers().size() >= *limit) {
      out.status = engine.select_rule() ? RunStatus::solution_limit : RunStatus::terminal;
      break;
    }
  }
  out.answers = engine.answers();
  return out;
}

}  // namespace boxtrace
