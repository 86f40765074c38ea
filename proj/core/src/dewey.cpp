#include "boxtrace/dewey.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>
#include <ostream>
#include <unordered_map>

#include "boxtrace/error.hpp"

namespace boxtrace {

struct DeweyPath::Node {
  // Keeps the ancestors alive; `parent` and `jump` point into that chain.
  std::shared_ptr<const Node> parent_ref;
  const Node* parent = nullptr;
  // Skip pointer (Myers' scheme): its depth depends only on this node's
  // depth, so two nodes at equal depth jump to equal depths.
  const Node* jump = nullptr;
  std::uint32_t last = 0;
  std::uint32_t length = 0;
};

namespace {

using Node = DeweyPath::Node;

std::uint32_t depth(const Node* n) { return n == nullptr ? 0 : n->length; }
const Node* jump(const Node* n) { return n == nullptr ? nullptr : n->jump; }

const Node* ancestor_at(const Node* n, std::uint32_t d) {
  while (depth(n) > d) {
    n = depth(n->jump) >= d ? n->jump : n->parent;
  }
  return n;
}

struct Key {
  const Node* parent;
  std::uint32_t last;
  bool operator==(const Key&) const = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    return std::hash<const void*>{}(k.parent) * 31 + k.last;
  }
};

struct Entry {
  const Node* raw;
  std::weak_ptr<const Node> weak;
};

// Intern table. Deliberately leaked: paths with static storage duration
// may be destroyed after any static table would be.
struct Table {
  std::mutex mu;
  std::unordered_map<Key, Entry, KeyHash> entries;
};

Table& table() {
  static Table* t = new Table;
  return *t;
}

void unregister(const Node* n) {
  Table& t = table();
  std::lock_guard lock(t.mu);
  auto it = t.entries.find(Key{n->parent, n->last});
  if (it != t.entries.end() && it->second.raw == n) {
    t.entries.erase(it);
  }
}

// Releasing a long chain would otherwise recurse once per ancestor.
void destroy(const Node* n) {
  thread_local bool active = false;
  thread_local std::vector<const Node*> pending;
  pending.push_back(n);
  if (active) {
    return;
  }
  active = true;
  while (!pending.empty()) {
    const Node* m = pending.back();
    pending.pop_back();
    unregister(m);
    delete m;
  }
  active = false;
}

std::shared_ptr<const Node> intern(const std::shared_ptr<const Node>& parent, std::uint32_t k) {
  if (k == 0) {
    throw PreconditionError("dewey path indices start at 1");
  }
  const Node* p = parent.get();
  Table& t = table();
  std::lock_guard lock(t.mu);
  Entry& e = t.entries[Key{p, k}];
  if (auto live = e.weak.lock()) {
    return live;
  }
  auto* n = new Node;
  n->parent_ref = parent;
  n->parent = p;
  n->last = k;
  n->length = depth(p) + 1;
  const Node* pj = jump(p);
  n->jump = p != nullptr && depth(p) - depth(pj) == depth(pj) - depth(jump(pj)) ? jump(pj) : p;
  std::shared_ptr<const Node> sp(n, destroy);
  e = Entry{n, sp};
  return sp;
}

}  // namespace

DeweyPath::DeweyPath(std::initializer_list<std::uint32_t> steps)
    : DeweyPath(std::vector<std::uint32_t>(steps)) {}

DeweyPath::DeweyPath(std::vector<std::uint32_t> steps) {
  for (auto k : steps) {
    node_ = intern(node_, k);
  }
}

DeweyPath DeweyPath::parse(std::string_view text) {
  if (text.empty() || text == "e" || text == "\xCE\xB5") {
    return {};
  }
  std::vector<std::uint32_t> steps;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto dot = std::min(text.find('.', start), text.size());
    std::uint32_t k = 0;
    const char* first = text.data() + start;
    const char* last = text.data() + dot;
    auto [p, ec] = std::from_chars(first, last, k);
    if (first == last || ec != std::errc{} || p != last || k == 0) {
      throw PreconditionError("malformed dewey path '" + std::string(text) + "'");
    }
    steps.push_back(k);
    start = dot + 1;
  }
  return DeweyPath(std::move(steps));
}

std::size_t DeweyPath::length() const noexcept { return depth(node_.get()); }

std::vector<std::uint32_t> DeweyPath::steps() const {
  std::vector<std::uint32_t> out(length());
  for (const Node* n = node_.get(); n != nullptr; n = n->parent) {
    out[n->length - 1] = n->last;
  }
  return out;
}

std::uint32_t DeweyPath::last() const {
  if (is_root()) {
    throw PreconditionError("the root has no child index");
  }
  return node_->last;
}

DeweyPath DeweyPath::parent() const {
  return is_root() ? DeweyPath() : DeweyPath(node_->parent_ref);
}

DeweyPath DeweyPath::child(std::uint32_t k) const { return DeweyPath(intern(node_, k)); }

DeweyPath DeweyPath::next_brother() const {
  if (is_root()) {
    throw PreconditionError("the root has no brother");
  }
  return DeweyPath(intern(node_->parent_ref, node_->last + 1));
}

bool DeweyPath::is_ancestor_or_self_of(const DeweyPath& other) const noexcept {
  return length() <= other.length() &&
         ancestor_at(other.node_.get(), depth(node_.get())) == node_.get();
}

std::strong_ordering operator<=>(const DeweyPath& a, const DeweyPath& b) noexcept {
  const Node* x = a.node_.get();
  const Node* y = b.node_.get();
  if (x == y) {
    return std::strong_ordering::equal;
  }
  const std::uint32_t dx = depth(x);
  const std::uint32_t dy = depth(y);
  x = ancestor_at(x, std::min(dx, dy));
  y = ancestor_at(y, std::min(dx, dy));
  if (x == y) {
    return dx <=> dy;
  }
  // Climb to the two children of the common ancestor.
  while (x->parent != y->parent) {
    if (x->jump != y->jump) {
      x = x->jump;
      y = y->jump;
    } else {
      x = x->parent;
      y = y->parent;
    }
  }
  return x->last <=> y->last;
}

std::string DeweyPath::to_string() const {
  if (is_root()) {
    return "\xCE\xB5";
  }
  std::string out;
  for (auto k : steps()) {
    if (!out.empty()) {
      out += '.';
    }
    out += std::to_string(k);
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const DeweyPath& p) { return os << p.to_string(); }

std::size_t DeweyPathHash::operator()(const DeweyPath& p) const noexcept {
  return std::hash<const void*>{}(p.node_.get());
}

}  // namespace boxtrace
