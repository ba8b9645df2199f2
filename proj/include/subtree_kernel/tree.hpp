#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stk {

using VertexId = std::uint32_t;
using Symbol = std::int32_t;

inline constexpr Symbol kNoLabel = -1;

enum class Order { ordered, unordered };

// How trees of a dataset are compared: sibling order significant or not, and
// whether vertex labels participate in isomorphism.
struct TreeMode {
  Order order = Order::unordered;
  bool labeled = false;

  bool ordered() const { return order == Order::ordered; }
  friend bool operator==(const TreeMode&, const TreeMode&) = default;
};

std::string to_string(const TreeMode& mode);

// Interned vertex labels of one dataset. Symbols are dense, starting at 0.
class Alphabet {
 public:
  Symbol intern(std::string_view name);
  std::optional<Symbol> find(std::string_view name) const;
  const std::string& name(Symbol symbol) const;
  std::size_t size() const { return names_.size(); }

  // A frozen alphabet rejects unknown names in intern().
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Symbol> index_;
  bool frozen_ = false;
};

// Arena-backed rooted tree. Vertex 0 is the root; vertices are only ever
// appended, so a Tree never becomes invalid and is never empty.
class Tree {
 public:
  explicit Tree(Symbol root_label = kNoLabel);

  VertexId root() const { return 0; }
  std::size_t size() const { return vertices_.size(); }
  bool contains(VertexId v) const { return v < vertices_.size(); }

  VertexId add_child(VertexId parent, Symbol label = kNoLabel);

  std::optional<VertexId> parent(VertexId v) const;
  std::span<const VertexId> children(VertexId v) const;
  Symbol label(VertexId v) const;
  bool is_leaf(VertexId v) const { return children(v).empty(); }
  bool has_labels() const;

  // Depth-first, leftmost child first.
  std::vector<VertexId> preorder(VertexId from = 0) const;
  // Children before parents, leftmost subtree first.
  std::vector<VertexId> postorder(VertexId from = 0) const;

 private:
  struct Vertex {
    std::optional<VertexId> parent;
    std::vector<VertexId> children;
    Symbol label = kNoLabel;
  };

  const Vertex& at(VertexId v) const;

  std::vector<Vertex> vertices_;
};

std::uint32_t height(const Tree& tree, VertexId v);
std::uint32_t height(const Tree& tree);
// Height of every vertex, indexed by vertex id.
std::vector<std::uint32_t> heights(const Tree& tree);
std::size_t outdegree(const Tree& tree);
// Childless vertices in preorder.
std::vector<VertexId> leaves(const Tree& tree);
std::size_t leaf_count(const Tree& tree, VertexId v);
std::size_t leaf_count(const Tree& tree);
// Vertices strictly above v, nearest first.
std::vector<VertexId> ancestors(const Tree& tree, VertexId v);
// Vertices strictly below v, in preorder.
std::vector<VertexId> descendants(const Tree& tree, VertexId v);

// Copy of T[v], preserving child order and labels.
Tree subtree(const Tree& tree, VertexId v);
// Copy of `tree` where T[v] has been replaced by `replacement`.
Tree replace_subtree(const Tree& tree, VertexId v, const Tree& replacement);
// The members placed, in order, under a fresh unlabeled root.
Tree supertree(std::span<const Tree> forest);
Tree strip_labels(const Tree& tree);

// Canonical encoding of a tree up to mode-isomorphism (AHU style). Two trees
// have equal signatures iff they are isomorphic as mode-trees.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::string code) : code_(std::move(code)) {}

  const std::string& code() const { return code_; }
  auto operator<=>(const Signature&) const = default;
  bool operator==(const Signature&) const = default;

 private:
  std::string code_;
};

Signature canonical_signature(const Tree& tree, const TreeMode& mode);
Signature canonical_signature(const Tree& tree, VertexId v, const TreeMode& mode);
// Signature of T[v] for every vertex v, indexed by vertex id.
std::vector<Signature> subtree_signatures(const Tree& tree, const TreeMode& mode);

// Number of vertices v of `target` with target[v] isomorphic to `pattern`.
std::size_t count_occurrences(const Tree& pattern, const Tree& target, const TreeMode& mode);

// Bracket format: tree := label? "(" tree* ")". In unlabeled mode labels are
// accepted and dropped. Throws ParseError.
Tree parse_tree(std::string_view text, const TreeMode& mode, Alphabet& alphabet);
Tree parse_tree(std::string_view text, const TreeMode& mode);
// Writes labels through `alphabet`; a labeled tree without an alphabet is an error.
std::string serialize_tree(const Tree& tree, const Alphabet* alphabet = nullptr);

}  // namespace stk

template <>
struct std::hash<stk::Signature> {
  std::size_t operator()(const stk::Signature& s) const noexcept {
    return std::hash<std::string>{}(s.code());
  }
};
