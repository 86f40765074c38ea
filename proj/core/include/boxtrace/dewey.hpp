#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace boxtrace {

// Node address in the proof tree: the child indices (each >= 1) on the way
// from the root. The empty path is the root.
//
// The ordering is the lexicographic one of the box model: a path is smaller
// than its extensions, and u.i.v < u.j.w whenever i < j. It is total.
//
// Paths are interned: equal paths share one node, so copies and equality
// are O(1). Nodes carry skip pointers, which bound ordering and ancestor
// queries by O(log length) instead of the length itself. Deep recursion
// makes paths thousands of steps long, and the engine compares them on
// every map access.
class DeweyPath {
 public:
  DeweyPath() = default;
  DeweyPath(std::initializer_list<std::uint32_t> steps);
  explicit DeweyPath(std::vector<std::uint32_t> steps);

  static DeweyPath root() { return {}; }
  // Accepts "ε", "e" or "" for the root and dot-separated positive indices
  // otherwise ("1.2.1"). Throws PreconditionError.
  static DeweyPath parse(std::string_view text);

  bool is_root() const noexcept { return node_ == nullptr; }
  std::size_t length() const noexcept;
  std::vector<std::uint32_t> steps() const;
  // Last child index; throws PreconditionError on the root.
  std::uint32_t last() const;

  // The root is its own parent.
  DeweyPath parent() const;
  DeweyPath child(std::uint32_t k) const;
  // Next brother: last index plus one. Throws PreconditionError on the root.
  DeweyPath next_brother() const;

  // True when `other` lies in the subtree rooted here (including itself).
  bool is_ancestor_or_self_of(const DeweyPath& other) const noexcept;

  std::string to_string() const;

  friend bool operator==(const DeweyPath& a, const DeweyPath& b) noexcept {
    return a.node_ == b.node_;
  }
  friend std::strong_ordering operator<=>(const DeweyPath& a, const DeweyPath& b) noexcept;

  struct Node;

 private:
  friend struct DeweyPathHash;
  explicit DeweyPath(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  // Null for the root.
  std::shared_ptr<const Node> node_;
};

std::ostream& operator<<(std::ostream& os, const DeweyPath& p);

inline bool dewey_less(const DeweyPath& a, const DeweyPath& b) { return a < b; }
inline DeweyPath parent(const DeweyPath& v) { return v.parent(); }
inline DeweyPath new_brother_path(const DeweyPath& v) { return v.next_brother(); }

struct DeweyPathHash {
  std::size_t operator()(const DeweyPath& p) const noexcept;
};

}  // namespace boxtrace
