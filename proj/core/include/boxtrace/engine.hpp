#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "boxtrace/dewey.hpp"
#include "boxtrace/program.hpp"
#include "boxtrace/substitution.hpp"
#include "boxtrace/term.hpp"

namespace boxtrace {

// The seven transition rules of the simplified box model.
enum class RuleId : std::uint8_t { call1, call2, exit1, exit2, fail2, redo1, redo2 };

inline constexpr std::array<RuleId, 7> kAllRules = {
    RuleId::call1, RuleId::call2, RuleId::exit1, RuleId::exit2,
    RuleId::fail2, RuleId::redo1, RuleId::redo2};

std::string_view to_string(RuleId r);
// Accepts the names produced by to_string(RuleId); throws PreconditionError.
RuleId parse_rule_id(std::string_view text);

// Labels of one node of the tree T.
struct NodeLabels {
  std::uint64_t num = 0;
  Term pred = Term::atom("true");
  // Remaining useful clauses, as positions in the program.
  std::vector<std::size_t> claus;
  bool first = false;

  friend bool operator==(const NodeLabels&, const NodeLabels&) = default;
};

// The full virtual state {T, u, n, num, pred, claus, first, ct, flr}.
// T is the key set of nodes(), so num, pred, claus and first always have
// exactly T as their domain.
class VirtualState {
 public:
  using NodeMap = std::map<DeweyPath, NodeLabels>;

  // S0 for `prog`: the root labelled with the goal and its useful clauses.
  static VirtualState initial(const Program& prog);

  VirtualState() = default;
  VirtualState(const VirtualState& other);
  VirtualState& operator=(const VirtualState& other);
  VirtualState(VirtualState&&) noexcept = default;
  VirtualState& operator=(VirtualState&&) noexcept = default;

  const NodeMap& nodes() const noexcept { return nodes_; }
  bool contains(const DeweyPath& v) const { return index_.contains(v); }
  const DeweyPath& current() const noexcept { return current_; }
  std::uint64_t last_number() const noexcept { return last_number_; }
  bool completed() const noexcept { return completed_; }
  bool failed() const noexcept { return failed_; }

  // Label accessors throw PreconditionError for nodes outside T.
  const NodeLabels& labels(const DeweyPath& v) const;
  std::uint64_t num(const DeweyPath& v) const { return labels(v).num; }
  const Term& pred(const DeweyPath& v) const { return labels(v).pred; }
  const std::vector<std::size_t>& claus(const DeweyPath& v) const { return labels(v).claus; }
  bool first(const DeweyPath& v) const { return labels(v).first; }

  bool is_leaf(const DeweyPath& v) const;
  std::size_t child_count(const DeweyPath& v) const;
  // crc: v extended by (number of children of v) + 1.
  DeweyPath new_child_path(const DeweyPath& v) const;

  // gcp: the greatest node of the subtree rooted at `u` whose clause list
  // is nonempty. Absent exactly when hcp(u) is false.
  std::optional<DeweyPath> greatest_choice_point(const DeweyPath& u) const;
  bool has_choice_point(const DeweyPath& u) const {
    return greatest_choice_point(u).has_value();
  }

  // ft: the first remaining clause of v is a fact. Throws
  // PreconditionError when claus(v) is empty.
  bool first_clause_is_fact(const Program& prog, const DeweyPath& v) const;

  friend bool operator==(const VirtualState& a, const VirtualState& b) {
    return a.nodes_ == b.nodes_ && a.current_ == b.current_ &&
           a.last_number_ == b.last_number_ && a.completed_ == b.completed_ &&
           a.failed_ == b.failed_;
  }

 private:
  friend class Engine;

  NodeLabels& mutable_labels(const DeweyPath& v);
  void add_node(const DeweyPath& v, NodeLabels labels);
  // Removes and returns the first clause of v.
  std::size_t pop_clause(const DeweyPath& v);
  // Removes every y with v < y. Returns the removed paths.
  std::vector<DeweyPath> remove_after(const DeweyPath& v);
  void sync_choice_point(const DeweyPath& v);

  NodeMap nodes_;
  // Hash lookup into nodes_. Keys are interned, so hashing is O(1) where a
  // map lookup costs log(|T|) path comparisons.
  std::unordered_map<DeweyPath, NodeMap::iterator, DeweyPathHash> index_;
  DeweyPath current_;
  std::uint64_t last_number_ = 0;
  bool completed_ = false;
  bool failed_ = false;
  // Nodes with a nonempty clause list; an index for gcp.
  std::set<DeweyPath> choice_points_;
};

// Engine-private bookkeeping for one node: what the external functions of
// the model need but the virtual state does not show.
struct NodeBook {
  // The predication at call time; never overwritten by exits.
  Term call_pred = Term::atom("true");
  // Renamed clause currently in use here; its body goal k is child k.
  std::optional<Clause> current_clause;
  // Substitution mark taken just before current_clause was unified.
  Substitution::Mark trail_mark = 0;
  // scs: the subtree rooted here is a proof tree.
  bool solved = false;
};

// One applied transition. `subject` is the node the trace event talks
// about: the current node, or gcp(current) for the Redo rules.
struct StepRecord {
  std::uint64_t chrono = 0;
  RuleId rule = RuleId::call1;
  DeweyPath pre_current;
  DeweyPath subject;
};

// Guard values of one state, exposed for diagnostics and tests.
struct GuardSet {
  std::array<bool, 7> holds{};

  bool operator[](RuleId r) const { return holds[static_cast<std::size_t>(r)]; }
  std::size_t count() const;
  std::vector<RuleId> applicable() const;
};

// Sequential state machine running a program under the simplified box
// model. The program must outlive the engine.
class Engine {
 public:
  explicit Engine(const Program& prog);
  Engine(Program&&) = delete;

  const Program& program() const noexcept { return *prog_; }
  const VirtualState& state() const noexcept { return state_; }
  const Substitution& substitution() const noexcept { return subst_; }
  const NodeBook& book(const DeweyPath& v) const;
  std::uint64_t steps_taken() const noexcept { return steps_; }
  // pud(root) at every Exit1 applied at the root, in order.
  const std::vector<Term>& answers() const noexcept { return answers_; }

  // Evaluates all seven guards on the current state.
  GuardSet guards() const;
  // The unique applicable rule, or nullopt in a terminal state. Throws
  // DeterminismViolation if several guards hold and InvariantViolation if
  // none holds in a state that is not terminal.
  std::optional<RuleId> select_rule() const;
  // True when the tree is complete and has no choice point left.
  bool terminal() const;

  // Applies `r`, which must be the selected rule.
  StepRecord apply_rule(RuleId r);
  // select_rule() then apply_rule(); nullopt when terminal.
  std::optional<StepRecord> step();

  // mhnb: u is not the last body goal of its parent's current clause.
  bool may_have_new_brother(const DeweyPath& u) const;
  // scs(u).
  bool success(const DeweyPath& u) const;
  // flr(u): u is a called leaf with no clause to resolve with.
  bool node_failed(const DeweyPath& u) const;
  // pud(u): the call predication of u under the current substitution.
  Term pred_update(const DeweyPath& u) const;
  // cpini(v) for a node about to be created as child k of its parent: body
  // goal k of the parent's current clause under the current substitution,
  // and the useful clauses for it.
  std::pair<std::vector<std::size_t>, Term> claus_pred_init(const DeweyPath& v) const;

  // Structural invariants of the state and bookkeeping, recomputed from
  // scratch. Returns a description of the first violation found.
  std::optional<std::string> check_invariants() const;

 private:
  void apply_unchecked(RuleId r, StepRecord& rec);
  // cpini(v) for a freshly created child or brother v whose parent's
  // current clause provides the goal. Adds v to T with number n+1.
  void create_node(const DeweyPath& v);
  // Pops the first clause of u, renames it apart and unifies its head with
  // u's call predication, recording the bindings on u's trail.
  const Clause& consume_clause(const DeweyPath& u);
  // Removes all nodes after v, undoes their bindings and v's own, and
  // clears v's current clause.
  void prune(const DeweyPath& v);
  void unsolve_ancestors(const DeweyPath& v);
  bool structural_success(const DeweyPath& u) const;

  const Program* prog_;
  VirtualState state_;
  std::unordered_map<DeweyPath, NodeBook, DeweyPathHash> books_;
  Substitution subst_;
  std::uint32_t fresh_counter_ = 1;
  std::uint64_t steps_ = 0;
  std::vector<Term> answers_;
};

enum class RunStatus { terminal, step_limit, solution_limit, term_limit };
std::string_view to_string(RunStatus s);

struct RunLimits {
  std::size_t max_steps = 100000;
  // Unlimited when absent.
  std::optional<std::size_t> max_solutions;
  // Largest predication a step may leave on the subject or current node.
  // Programs like `p(X) :- p(f(X,X))` double their goals on every call,
  // and every traversal of such a goal is exponential in the step count.
  std::uint64_t max_term_size = 100000;
};

// Size of the predications a step wrote: the subject's and the new
// current node's labels.
std::uint64_t written_term_size(const VirtualState& s, const StepRecord& rec);

struct RunOptions {
  RunLimits limits;
  // Keep a copy of the virtual state after every step.
  bool record_states = false;
  // Recheck structural invariants after every step; throws
  // InvariantViolation on the first failure.
  bool check_invariants = false;
};

// The full virtual trace: S0 and, per step, the rule applied and
// (optionally) the state reached.
struct VirtualTrace {
  VirtualState initial;
  std::vector<StepRecord> steps;
  std::vector<VirtualState> states;
};

struct RunResult {
  VirtualTrace trace;
  std::vector<Term> answers;
  RunStatus status = RunStatus::terminal;
};

RunResult run(const Program& prog, const RunOptions& options = {});

}  // namespace boxtrace
