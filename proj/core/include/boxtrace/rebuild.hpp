#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "boxtrace/dewey.hpp"
#include "boxtrace/engine.hpp"
#include "boxtrace/error.hpp"
#include "boxtrace/term.hpp"
#include "boxtrace/trace.hpp"

namespace boxtrace {

// Node number and goal of the event that follows the one being read.
struct Lookahead {
  std::uint64_t node = 0;
  Term goal = Term::atom("true");
};

struct RestrictedNode {
  std::uint64_t num = 0;
  Term pred = Term::atom("true");

  friend bool operator==(const RestrictedNode&, const RestrictedNode&) = default;
};

// The restricted state Q = {T, u, num, pred}: what a trace reader can know
// about the proof tree.
class RestrictedState {
 public:
  using NodeMap = std::map<DeweyPath, RestrictedNode>;

  // Q0: the root alone, numbered 1 and labelled with the goal.
  static RestrictedState initial(const Term& goal);
  // S restricted to {T, u, num, pred}.
  static RestrictedState restrict(const VirtualState& s);

  const NodeMap& nodes() const noexcept { return nodes_; }
  const DeweyPath& current() const noexcept { return current_; }
  bool contains(const DeweyPath& v) const { return nodes_.contains(v); }
  std::uint64_t num(const DeweyPath& v) const;
  const Term& pred(const DeweyPath& v) const;

  // nd: the node created with number n. Throws PreconditionError when no
  // node of T carries n.
  const DeweyPath& node_of(std::uint64_t n) const;

  std::size_t child_count(const DeweyPath& v) const;

  // Same tree, current node and numbers; predications compared up to
  // alpha-renaming.
  bool matches(const VirtualState& s) const;
  // First difference from `s`, for diagnostics.
  std::optional<std::string> difference(const VirtualState& s) const;

  // nd and num are mutual inverses; T is prefix-closed and contains u.
  std::optional<std::string> check_invariants() const;

  friend bool operator==(const RestrictedState& a, const RestrictedState& b) {
    return a.nodes_ == b.nodes_ && a.current_ == b.current_;
  }

 private:
  friend RestrictedState apply_event(RestrictedState q, RuleId rule, const TraceEvent& e,
                                     const std::optional<Lookahead>& la);

  void add(const DeweyPath& v, std::uint64_t num, Term pred, std::uint64_t chrono);
  void remove_after(const DeweyPath& v);

  NodeMap nodes_;
  DeweyPath current_;
  std::unordered_map<std::uint64_t, DeweyPath> by_number_;
};

// Which rule produced `e`, from its port and the node numbers of `e` and
// the next event. Throws RebuildError for patterns no complete trace has
// (marked truncated when the stream ended too early).
RuleId classify(const RestrictedState& q, const TraceEvent& e, const std::optional<Lookahead>& la);

// Applies the interpretation rule `rule` to Q. The depth attribute is never
// read. Throws RebuildError when the event contradicts Q (wrong node number
// or goal for the current node, unknown node number, reused number).
RestrictedState apply_event(RestrictedState q, RuleId rule, const TraceEvent& e,
                            const std::optional<Lookahead>& la);

struct RebuiltStep {
  std::uint64_t chrono = 0;
  RuleId rule = RuleId::call1;
};

// Streaming rebuild with one event of lookahead: push() returns the step
// for the previous event, after which state() is the state reached by it.
class Rebuilder {
 public:
  explicit Rebuilder(RestrictedState q0) : state_(std::move(q0)) {}

  std::optional<RebuiltStep> push(TraceEvent e);
  // Processes the last pending event with no lookahead.
  std::optional<RebuiltStep> finish();

  const RestrictedState& state() const noexcept { return state_; }

 private:
  RebuiltStep process(const TraceEvent& e, const std::optional<Lookahead>& la);

  RestrictedState state_;
  std::optional<TraceEvent> pending_;
  std::uint64_t expected_chrono_ = 1;
};

struct RebuildResult {
  // One entry per event processed: the rule and the state it reached.
  std::vector<std::pair<RuleId, RestrictedState>> steps;
  // Set when the stream was rejected; `steps` is then the valid prefix.
  std::optional<RebuildError> error;

  bool ok() const noexcept { return !error.has_value(); }
};

RebuildResult rebuild(const RestrictedState& q0, const std::vector<TraceEvent>& events);

// Q0 from a stored trace: the goal of its first event, which must be the
// Call of node 1. Throws RebuildError.
RestrictedState initial_state_from(const std::vector<TraceEvent>& events);

// Chrono of the first event whose depth differs from the depth of its
// subject node in the rebuilt tree. Independent of the rebuild itself,
// which ignores depths.
std::optional<std::uint64_t> first_depth_mismatch(const RestrictedState& q0,
                                                  const std::vector<TraceEvent>& events);

enum class TraceOutcome { success, failure, unfinished };
std::string_view to_string(TraceOutcome o);
// Derived from the last event: Exit of node 1 is a proof, Fail of node 1 a
// failed search.
TraceOutcome outcome_of(const std::vector<TraceEvent>& events);

// Indented tree, one node per line: path, creation number, predication.
std::string render_tree(const RestrictedState& q);
std::string tree_to_json(const RestrictedState& q);

}  // namespace boxtrace
