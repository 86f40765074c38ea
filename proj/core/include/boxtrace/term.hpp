#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace boxtrace {

// A logic variable. Index 0 is reserved for variables as written in source
// text; renamed copies of clause variables carry the renaming counter.
struct Variable {
  std::string name;
  std::uint32_t index = 0;

  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

struct VariableHash {
  std::size_t operator()(const Variable& v) const noexcept;
};

// Immutable first-order term: a variable, an atom, or a compound with at
// least one argument. Copies share structure.
class Term {
 public:
  enum class Kind : std::uint8_t { variable, atom, compound };

  static Term variable(std::string name, std::uint32_t index = 0);
  static Term variable(const Variable& v) { return variable(v.name, v.index); }
  static Term atom(std::string name);
  // Throws PreconditionError if `args` is empty; zero-arity terms are atoms.
  static Term compound(std::string functor, std::vector<Term> args);

  Kind kind() const noexcept { return node_->kind; }
  bool is_variable() const noexcept { return kind() == Kind::variable; }
  bool is_atom() const noexcept { return kind() == Kind::atom; }
  bool is_compound() const noexcept { return kind() == Kind::compound; }

  // Variable name, atom name or functor.
  const std::string& name() const noexcept { return node_->name; }
  // Fresh index of a variable; 0 for other kinds.
  std::uint32_t index() const noexcept { return node_->index; }
  std::span<const Term> args() const noexcept { return node_->args; }
  std::size_t arity() const noexcept { return node_->args.size(); }
  // Number of symbol occurrences when written out, saturating at the
  // maximum value. Shared subterms count once per occurrence.
  std::uint64_t size() const noexcept { return node_->size; }
  // No variable occurs in the term. Cached, so substitution and occurs
  // checks skip ground subterms in O(1).
  bool is_ground() const noexcept { return node_->ground; }

  Variable as_variable() const;

  bool same_node(const Term& other) const noexcept { return node_ == other.node_; }

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::uint32_t index;
    std::vector<Term> args;
    std::uint64_t size;
    bool ground;
  };

  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// A predication is an atom or compound (never a variable).
inline bool is_predication(const Term& t) noexcept { return !t.is_variable(); }

// Canonical text, no internal spaces. Variables render as `Name` when their
// index is 0 and `Name_k` otherwise.
std::string to_string(const Term& t);
std::ostream& operator<<(std::ostream& os, const Term& t);

// Variables in order of first occurrence, without duplicates.
std::vector<Variable> variables_of(const Term& t);

// True when a bijective variable renaming maps `a` onto `b`.
bool alpha_equivalent(const Term& a, const Term& b);

// Renames variables to `_V0`, `_V1`, ... by order of first occurrence, so
// alpha-equivalent terms normalize to equal terms.
Term alpha_normalize(const Term& t);

}  // namespace boxtrace
