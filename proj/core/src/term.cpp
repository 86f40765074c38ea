#include "boxtrace/term.hpp"

#include <functional>
#include <limits>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "boxtrace/error.hpp"

namespace boxtrace {

std::size_t VariableHash::operator()(const Variable& v) const noexcept {
  return std::hash<std::string>{}(v.name) * 31u + v.index;
}

Term Term::variable(std::string name, std::uint32_t index) {
  return Term(std::make_shared<const Node>(Node{Kind::variable, std::move(name), index, {}, 1, false}));
}

Term Term::atom(std::string name) {
  return Term(std::make_shared<const Node>(Node{Kind::atom, std::move(name), 0, {}, 1, true}));
}

Term Term::compound(std::string functor, std::vector<Term> args) {
  if (args.empty()) {
    throw PreconditionError("compound term '" + functor + "' needs at least one argument");
  }
  std::uint64_t size = 1;
  bool ground = true;
  for (const Term& a : args) {
    ground = ground && a.is_ground();
    const std::uint64_t n = a.size();
    size = n > std::numeric_limits<std::uint64_t>::max() - size
               ? std::numeric_limits<std::uint64_t>::max()
               : size + n;
  }
  return Term(std::make_shared<const Node>(
      Node{Kind::compound, std::move(functor), 0, std::move(args), size, ground}));
}

Variable Term::as_variable() const {
  if (!is_variable()) {
    throw PreconditionError("term '" + to_string(*this) + "' is not a variable");
  }
  return Variable{name(), index()};
}

bool operator==(const Term& a, const Term& b) {
  if (a.same_node(b)) {
    return true;
  }
  if (a.kind() != b.kind() || a.name() != b.name() || a.index() != b.index() ||
      a.arity() != b.arity()) {
    return false;
  }
  auto xs = a.args();
  auto ys = b.args();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] == ys[i])) {
      return false;
    }
  }
  return true;
}

namespace {

void render(const Term& t, std::string& out) {
  out += t.name();
  switch (t.kind()) {
    case Term::Kind::variable:
      if (t.index() != 0) {
        out += '_';
        out += std::to_string(t.index());
      }
      break;
    case Term::Kind::atom:
      break;
    case Term::Kind::compound: {
      out += '(';
      bool first = true;
      for (const Term& arg : t.args()) {
        if (!first) {
          out += ',';
        }
        first = false;
        render(arg, out);
      }
      out += ')';
      break;
    }
  }
}

void collect(const Term& t, std::vector<Variable>& out,
             std::unordered_set<Variable, VariableHash>& seen) {
  if (t.is_variable()) {
    Variable v = t.as_variable();
    if (seen.insert(v).second) {
      out.push_back(std::move(v));
    }
    return;
  }
  for (const Term& arg : t.args()) {
    collect(arg, out, seen);
  }
}

using VarMap = std::unordered_map<Variable, Variable, VariableHash>;

bool alpha_match(const Term& a, const Term& b, VarMap& forward, VarMap& backward) {
  if (a.is_ground() || b.is_ground()) {
    return a == b;
  }
  if (a.kind() != b.kind()) {
    return false;
  }
  if (a.is_variable()) {
    Variable va = a.as_variable();
    Variable vb = b.as_variable();
    auto f = forward.find(va);
    auto r = backward.find(vb);
    if (f == forward.end() && r == backward.end()) {
      forward.emplace(va, vb);
      backward.emplace(std::move(vb), std::move(va));
      return true;
    }
    return f != forward.end() && r != backward.end() && f->second == vb && r->second == va;
  }
  if (a.name() != b.name() || a.arity() != b.arity()) {
    return false;
  }
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!alpha_match(a.args()[i], b.args()[i], forward, backward)) {
      return false;
    }
  }
  return true;
}

Term normalize(const Term& t, std::unordered_map<Variable, Term, VariableHash>& names) {
  switch (t.kind()) {
    case Term::Kind::variable: {
      auto [it, inserted] = names.try_emplace(t.as_variable(), t);
      if (inserted) {
        it->second = Term::variable("_V" + std::to_string(names.size() - 1));
      }
      return it->second;
    }
    case Term::Kind::atom:
      return t;
    case Term::Kind::compound: {
      std::vector<Term> args;
      args.reserve(t.arity());
      for (const Term& arg : t.args()) {
        args.push_back(normalize(arg, names));
      }
      return Term::compound(t.name(), std::move(args));
    }
  }
  return t;
}

}  // namespace

std::string to_string(const Term& t) {
  std::string out;
  render(t, out);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Term& t) { return os << to_string(t); }

std::vector<Variable> variables_of(const Term& t) {
  std::vector<Variable> out;
  std::unordered_set<Variable, VariableHash> seen;
  collect(t, out, seen);
  return out;
}

bool alpha_equivalent(const Term& a, const Term& b) {
  if (a.same_node(b)) {
    return true;
  }
  VarMap forward;
  VarMap backward;
  return alpha_match(a, b, forward, backward);
}

Term alpha_normalize(const Term& t) {
  std::unordered_map<Variable, Term, VariableHash> names;
  return normalize(t, names);
}

}  // namespace boxtrace
