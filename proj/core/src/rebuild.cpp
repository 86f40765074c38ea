#include "boxtrace/rebuild.hpp"

#include <sstream>

#include "json.hpp"

namespace boxtrace {

// ---------------------------------------------------------------------------
// RestrictedState

RestrictedState RestrictedState::initial(const Term& goal) {
  RestrictedState q;
  q.nodes_.emplace(DeweyPath::root(), RestrictedNode{1, goal});
  q.by_number_.emplace(1, DeweyPath::root());
  return q;
}

RestrictedState RestrictedState::restrict(const VirtualState& s) {
  RestrictedState q;
  for (const auto& [v, lab] : s.nodes()) {
    q.nodes_.emplace_hint(q.nodes_.end(), v, RestrictedNode{lab.num, lab.pred});
    q.by_number_.emplace(lab.num, v);
  }
  q.current_ = s.current();
  return q;
}

std::uint64_t RestrictedState::num(const DeweyPath& v) const {
  auto it = nodes_.find(v);
  if (it == nodes_.end()) {
    throw PreconditionError("node " + v.to_string() + " is not in the tree");
  }
  return it->second.num;
}

const Term& RestrictedState::pred(const DeweyPath& v) const {
  auto it = nodes_.find(v);
  if (it == nodes_.end()) {
    throw PreconditionError("node " + v.to_string() + " is not in the tree");
  }
  return it->second.pred;
}

const DeweyPath& RestrictedState::node_of(std::uint64_t n) const {
  auto it = by_number_.find(n);
  if (it == by_number_.end()) {
    throw PreconditionError("no node has creation number " + std::to_string(n));
  }
  return it->second;
}

std::size_t RestrictedState::child_count(const DeweyPath& v) const {
  std::size_t k = 0;
  while (nodes_.contains(v.child(static_cast<std::uint32_t>(k + 1)))) {
    ++k;
  }
  return k;
}

std::optional<std::string> RestrictedState::difference(const VirtualState& s) const {
  if (current_ != s.current()) {
    return "current node " + current_.to_string() + " vs " + s.current().to_string();
  }
  if (nodes_.size() != s.nodes().size()) {
    return "tree has " + std::to_string(nodes_.size()) + " nodes vs " +
           std::to_string(s.nodes().size());
  }
  auto a = nodes_.begin();
  auto b = s.nodes().begin();
  for (; a != nodes_.end(); ++a, ++b) {
    if (a->first != b->first) {
      return "node " + a->first.to_string() + " vs " + b->first.to_string();
    }
    if (a->second.num != b->second.num) {
      return "num(" + a->first.to_string() + ") " + std::to_string(a->second.num) + " vs " +
             std::to_string(b->second.num);
    }
    if (!a->second.pred.same_node(b->second.pred) &&
        !alpha_equivalent(a->second.pred, b->second.pred)) {
      return "pred(" + a->first.to_string() + ") " + to_string(a->second.pred) + " vs " +
             to_string(b->second.pred);
    }
  }
  return std::nullopt;
}

bool RestrictedState::matches(const VirtualState& s) const { return !difference(s).has_value(); }

std::optional<std::string> RestrictedState::check_invariants() const {
  if (!nodes_.contains(DeweyPath::root()) || nodes_.at(DeweyPath::root()).num != 1) {
    return "root missing or not numbered 1";
  }
  if (!nodes_.contains(current_)) {
    return "current node " + current_.to_string() + " is not in the tree";
  }
  if (by_number_.size() != nodes_.size()) {
    return "num is not injective";
  }
  for (const auto& [v, node] : nodes_) {
    if (!v.is_root() && !nodes_.contains(v.parent())) {
      return "tree is not prefix-closed at " + v.to_string();
    }
    auto it = by_number_.find(node.num);
    if (it == by_number_.end() || it->second != v) {
      return "nd(num(" + v.to_string() + ")) is not " + v.to_string();
    }
  }
  return std::nullopt;
}

void RestrictedState::add(const DeweyPath& v, std::uint64_t num, Term pred, std::uint64_t chrono) {
  if (nodes_.contains(v)) {
    throw RebuildError("node " + v.to_string() + " already exists", chrono);
  }
  if (!by_number_.emplace(num, v).second) {
    throw RebuildError("creation number " + std::to_string(num) + " is already in use", chrono);
  }
  nodes_.emplace(v, RestrictedNode{num, std::move(pred)});
}

void RestrictedState::remove_after(const DeweyPath& v) {
  auto it = nodes_.upper_bound(v);
  for (auto k = it; k != nodes_.end(); ++k) {
    by_number_.erase(k->second.num);
  }
  nodes_.erase(it, nodes_.end());
}

// ---------------------------------------------------------------------------
// Interpretation rules

RuleId classify(const RestrictedState& q, const TraceEvent& e,
                const std::optional<Lookahead>& la) {
  const std::uint64_t r = e.node;
  const bool at_root = q.current().is_root();
  switch (e.port) {
    case Port::call:
      if (!la || la->node == r) {
        return RuleId::call1;
      }
      if (la->node > r) {
        return RuleId::call2;
      }
      throw RebuildError("Call is followed by an older node", e.chrono);
    case Port::exit:
      if (!la) {
        if (at_root) {
          return RuleId::exit1;
        }
        throw RebuildError("trace ends with an Exit below the root", e.chrono, true);
      }
      if (la->node < r || at_root) {
        return RuleId::exit1;
      }
      if (la->node > r) {
        return RuleId::exit2;
      }
      throw RebuildError("Exit is followed by an event on the same node", e.chrono);
    case Port::fail:
      return RuleId::fail2;
    case Port::redo:
      if (!la) {
        throw RebuildError("trace ends with a Redo", e.chrono, true);
      }
      if (la->node == r) {
        return RuleId::redo1;
      }
      if (la->node > r) {
        return RuleId::redo2;
      }
      throw RebuildError("Redo is followed by an older node", e.chrono);
  }
  throw RebuildError("unknown port", e.chrono);
}

namespace {

const DeweyPath& node_or_throw(const RestrictedState& q, std::uint64_t n, std::uint64_t chrono) {
  try {
    return q.node_of(n);
  } catch (const PreconditionError& err) {
    throw RebuildError(err.what(), chrono);
  }
}

void expect_current(const RestrictedState& q, const TraceEvent& e) {
  const DeweyPath& u = q.current();
  if (q.num(u) != e.node) {
    throw RebuildError("event is about node " + std::to_string(e.node) +
                           " but the current node has number " + std::to_string(q.num(u)),
                       e.chrono);
  }
}

void expect_goal(const RestrictedState& q, const DeweyPath& v, const TraceEvent& e) {
  if (!alpha_equivalent(q.pred(v), e.goal)) {
    throw RebuildError("goal " + to_string(e.goal) + " differs from node label " +
                           to_string(q.pred(v)),
                       e.chrono);
  }
}

const Lookahead& need(const std::optional<Lookahead>& la, const TraceEvent& e) {
  if (!la) {
    throw RebuildError("rule needs the next event", e.chrono, true);
  }
  return *la;
}

}  // namespace

RestrictedState apply_event(RestrictedState q, RuleId rule, const TraceEvent& e,
                            const std::optional<Lookahead>& la) {
  const DeweyPath u = q.current();
  switch (rule) {
    case RuleId::call1:
      expect_current(q, e);
      expect_goal(q, u, e);
      break;
    case RuleId::call2: {
      expect_current(q, e);
      expect_goal(q, u, e);
      const Lookahead& next = need(la, e);
      const DeweyPath v = node_or_throw(q, e.node, e.chrono).child(
          static_cast<std::uint32_t>(q.child_count(node_or_throw(q, e.node, e.chrono)) + 1));
      q.add(v, next.node, next.goal, e.chrono);
      q.current_ = v;
      break;
    }
    case RuleId::exit1:
      expect_current(q, e);
      q.nodes_.at(u).pred = e.goal;
      q.current_ = u.parent();
      break;
    case RuleId::exit2: {
      expect_current(q, e);
      if (u.is_root()) {
        throw RebuildError("the root has no brother", e.chrono);
      }
      const Lookahead& next = need(la, e);
      const DeweyPath v = u.next_brother();
      q.nodes_.at(u).pred = e.goal;
      q.add(v, next.node, next.goal, e.chrono);
      q.current_ = v;
      break;
    }
    case RuleId::fail2:
      expect_current(q, e);
      expect_goal(q, u, e);
      q.current_ = u.parent();
      break;
    case RuleId::redo1:
    case RuleId::redo2: {
      const DeweyPath v = node_or_throw(q, e.node, e.chrono);
      expect_goal(q, v, e);
      q.remove_after(v);
      if (rule == RuleId::redo1) {
        q.current_ = v;
      } else {
        const Lookahead& next = need(la, e);
        const DeweyPath w = v.child(static_cast<std::uint32_t>(q.child_count(v) + 1));
        q.add(w, next.node, next.goal, e.chrono);
        q.current_ = w;
      }
      break;
    }
  }
  return q;
}

// ---------------------------------------------------------------------------
// Rebuilder

RebuiltStep Rebuilder::process(const TraceEvent& e, const std::optional<Lookahead>& la) {
  const RuleId rule = classify(state_, e, la);
  state_ = apply_event(std::move(state_), rule, e, la);
  return RebuiltStep{e.chrono, rule};
}

std::optional<RebuiltStep> Rebuilder::push(TraceEvent e) {
  if (e.chrono != expected_chrono_) {
    throw RebuildError("expected chrono " + std::to_string(expected_chrono_), e.chrono);
  }
  ++expected_chrono_;
  std::optional<RebuiltStep> out;
  if (pending_) {
    out = process(*pending_, Lookahead{e.node, e.goal});
  }
  pending_ = std::move(e);
  return out;
}

std::optional<RebuiltStep> Rebuilder::finish() {
  if (!pending_) {
    return std::nullopt;
  }
  TraceEvent e = std::move(*pending_);
  pending_.reset();
  return process(e, std::nullopt);
}

RebuildResult rebuild(const RestrictedState& q0, const std::vector<TraceEvent>& events) {
  RebuildResult out;
  Rebuilder rb(q0);
  try {
    for (const TraceEvent& e : events) {
      if (auto step = rb.push(e)) {
        out.steps.emplace_back(step->rule, rb.state());
      }
    }
    if (auto step = rb.finish()) {
      out.steps.emplace_back(step->rule, rb.state());
    }
  } catch (const RebuildError& err) {
    out.error = err;
  }
  return out;
}

RestrictedState initial_state_from(const std::vector<TraceEvent>& events) {
  if (events.empty()) {
    throw RebuildError("empty trace has no goal", 0, true);
  }
  const TraceEvent& e = events.front();
  if (e.port != Port::call || e.node != 1) {
    throw RebuildError("a trace starts with the Call of node 1", e.chrono);
  }
  return RestrictedState::initial(e.goal);
}

std::optional<std::uint64_t> first_depth_mismatch(const RestrictedState& q0,
                                                  const std::vector<TraceEvent>& events) {
  RestrictedState q = q0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const TraceEvent& e = events[i];
    std::optional<Lookahead> la;
    if (i + 1 < events.size()) {
      la = Lookahead{events[i + 1].node, events[i + 1].goal};
    }
    const RuleId rule = classify(q, e, la);
    const DeweyPath subject = port_of(rule) == Port::redo ? q.node_of(e.node) : q.current();
    if (e.depth != lpath(subject)) {
      return e.chrono;
    }
    q = apply_event(std::move(q), rule, e, la);
  }
  return std::nullopt;
}

std::string_view to_string(TraceOutcome o) {
  switch (o) {
    case TraceOutcome::success:
      return "success";
    case TraceOutcome::failure:
      return "failure";
    case TraceOutcome::unfinished:
      return "unfinished";
  }
  return "?";
}

TraceOutcome outcome_of(const std::vector<TraceEvent>& events) {
  if (events.empty() || events.back().node != 1) {
    return TraceOutcome::unfinished;
  }
  switch (events.back().port) {
    case Port::exit:
      return TraceOutcome::success;
    case Port::fail:
      return TraceOutcome::failure;
    default:
      return TraceOutcome::unfinished;
  }
}

std::string render_tree(const RestrictedState& q) {
  std::ostringstream os;
  for (const auto& [v, node] : q.nodes()) {
    os << std::string(2 * v.length(), ' ') << v << " [" << node.num << "] " << node.pred;
    if (v == q.current()) {
      os << "  <- current";
    }
    os << '\n';
  }
  return os.str();
}

std::string tree_to_json(const RestrictedState& q) {
  nlohmann::ordered_json j;
  auto path = [](const DeweyPath& v) {
    return nlohmann::json(v.steps());
  };
  j["current"] = path(q.current());
  j["nodes"] = nlohmann::json::array();
  for (const auto& [v, node] : q.nodes()) {
    nlohmann::ordered_json n;
    n["path"] = path(v);
    n["num"] = node.num;
    n["pred"] = to_string(node.pred);
    j["nodes"].push_back(std::move(n));
  }
  return j.dump();
}

}  // namespace boxtrace
