#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

#include "boxtrace/term.hpp"

namespace boxtrace {

// Triangular variable bindings with a trail. Bindings are never cyclic and
// never map a variable to itself; apply_subst resolves chains, so the
// substitution it denotes is idempotent.
class Substitution {
 public:
  // Position in the trail; pass to undo_to() to drop every later binding.
  using Mark = std::size_t;

  const Term* lookup(const Variable& v) const;

  // Binds an unbound variable. Throws PreconditionError if `v` is already
  // bound or `t` is `v` itself.
  void bind(const Variable& v, Term t);

  Mark mark() const noexcept { return trail_.size(); }
  void undo_to(Mark m);

  // Follows variable bindings until reaching an unbound variable or a
  // non-variable term.
  Term walk(const Term& t) const;

  std::size_t size() const noexcept { return bindings_.size(); }
  bool empty() const noexcept { return bindings_.empty(); }
  const std::unordered_map<Variable, Term, VariableHash>& bindings() const noexcept {
    return bindings_;
  }

 private:
  std::unordered_map<Variable, Term, VariableHash> bindings_;
  std::vector<Variable> trail_;
};

// Most general unifier of `a` and `b` extending `s`, with occurs check.
std::optional<Substitution> unify(const Term& a, const Term& b, const Substitution& s);

// In-place variant: on failure `s` is restored to its state at entry.
bool unify_in_place(const Term& a, const Term& b, Substitution& s);

// Replaces bound variables transitively; unbound variables stay.
Term apply_subst(const Term& t, const Substitution& s);

// True when variable `v` occurs in `t` under `s`.
bool occurs_in(const Variable& v, const Term& t, const Substitution& s);

}  // namespace boxtrace
