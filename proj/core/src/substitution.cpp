#include "boxtrace/substitution.hpp"

#include <tuple>
#include <utility>

#include "boxtrace/error.hpp"

namespace boxtrace {

const Term* Substitution::lookup(const Variable& v) const {
  auto it = bindings_.find(v);
  return it == bindings_.end() ? nullptr : &it->second;
}

void Substitution::bind(const Variable& v, Term t) {
  if (t.is_variable() && t.name() == v.name && t.index() == v.index) {
    throw PreconditionError("cannot bind variable " + to_string(t) + " to itself");
  }
  auto [it, inserted] = bindings_.try_emplace(v, std::move(t));
  if (!inserted) {
    throw PreconditionError("variable " + to_string(Term::variable(v)) + " is already bound");
  }
  trail_.push_back(v);
}

void Substitution::undo_to(Mark m) {
  while (trail_.size() > m) {
    bindings_.erase(trail_.back());
    trail_.pop_back();
  }
}

Term Substitution::walk(const Term& t) const {
  Term cur = t;
  while (cur.is_variable()) {
    const Term* next = lookup(cur.as_variable());
    if (next == nullptr) {
      break;
    }
    cur = *next;
  }
  return cur;
}

bool occurs_in(const Variable& v, const Term& t, const Substitution& s) {
  Term w = s.walk(t);
  if (w.is_ground()) {
    return false;
  }
  if (w.is_variable()) {
    return w.name() == v.name && w.index() == v.index;
  }
  for (const Term& arg : w.args()) {
    if (occurs_in(v, arg, s)) {
      return true;
    }
  }
  return false;
}

namespace {

// Newer variables (higher index) are bound to older ones so that answers
// keep the caller's variable names where possible.
bool bind_older_first(const Variable& a, const Variable& b) {
  return std::tie(a.index, a.name) > std::tie(b.index, b.name);
}

bool unify_terms(const Term& x, const Term& y, Substitution& s) {
  Term a = s.walk(x);
  Term b = s.walk(y);
  if (a.is_ground() && b.is_ground()) {
    return a == b;
  }
  if (a.is_variable() && b.is_variable()) {
    Variable va = a.as_variable();
    Variable vb = b.as_variable();
    if (va == vb) {
      return true;
    }
    if (bind_older_first(va, vb)) {
      s.bind(va, b);
    } else {
      s.bind(vb, a);
    }
    return true;
  }
  if (a.is_variable()) {
    Variable va = a.as_variable();
    if (occurs_in(va, b, s)) {
      return false;
    }
    s.bind(va, b);
    return true;
  }
  if (b.is_variable()) {
    Variable vb = b.as_variable();
    if (occurs_in(vb, a, s)) {
      return false;
    }
    s.bind(vb, a);
    return true;
  }
  if (a.kind() != b.kind() || a.name() != b.name() || a.arity() != b.arity()) {
    return false;
  }
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!unify_terms(a.args()[i], b.args()[i], s)) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool unify_in_place(const Term& a, const Term& b, Substitution& s) {
  const auto m = s.mark();
  if (unify_terms(a, b, s)) {
    return true;
  }
  s.undo_to(m);
  return false;
}

std::optional<Substitution> unify(const Term& a, const Term& b, const Substitution& s) {
  Substitution out = s;
  if (!unify_terms(a, b, out)) {
    return std::nullopt;
  }
  return out;
}

Term apply_subst(const Term& t, const Substitution& s) {
  if (s.empty() || t.is_ground()) {
    return t;
  }
  Term w = s.walk(t);
  if (!w.is_compound()) {
    return w;
  }
  std::vector<Term> args;
  args.reserve(w.arity());
  bool changed = false;
  for (const Term& arg : w.args()) {
    args.push_back(apply_subst(arg, s));
    changed = changed || !args.back().same_node(arg);
  }
  if (!changed) {
    return w;
  }
  return Term::compound(w.name(), std::move(args));
}

}  // namespace boxtrace
