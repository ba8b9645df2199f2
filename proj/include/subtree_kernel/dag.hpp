#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subtree_kernel/tree.hpp"

namespace stk {

struct DagEdge {
  VertexId child = 0;
  // Number of occurrences of `child` below the parent. Always 1 in ordered
  // mode, where repeated children are repeated edges.
  std::uint32_t multiplicity = 1;

  friend bool operator==(const DagEdge&, const DagEdge&) = default;
};

struct DagVertex {
  std::uint32_t height = 0;
  Symbol label = kNoLabel;
  std::vector<DagEdge> children;
};

// Compressed quotient of a tree (or of a forest placed under an artificial
// root) by mode-isomorphism of subtrees.
//
// Unordered mode keeps each vertex's edges sorted by child id with distinct
// children. The artificial root of a forest is the exception: its i-th edge
// always leads to the i-th member, duplicates included.
class Dag {
 public:
  explicit Dag(TreeMode mode = {}) : mode_(mode) {}

  const TreeMode& mode() const { return mode_; }
  std::size_t size() const { return vertices_.size(); }
  const DagVertex& vertex(VertexId v) const;
  std::span<const DagVertex> vertices() const { return vertices_; }

  VertexId root() const;
  bool has_root() const { return root_.has_value(); }
  bool has_artificial_root() const { return artificial_root_; }
  std::uint32_t height() const { return vertex(root()).height; }

  // Roots of the forest members, in dataset order (artificial root only).
  std::vector<VertexId> member_roots() const;
  std::size_t member_count() const;
  // Number of distinct subtree classes represented (the artificial root excluded).
  std::size_t class_count() const { return size() - (artificial_root_ ? 1 : 0); }

  // Vertices without a parent.
  std::vector<VertexId> parentless() const;

  // Appends a vertex; its height is derived from the children, which must
  // already exist. Unordered-mode edges are normalized.
  VertexId add_vertex(Symbol label, std::vector<DagEdge> children);
  VertexId add_vertex(Symbol label, std::span<const VertexId> children);
  // Appends the artificial root over the given member roots and makes it the root.
  VertexId add_artificial_root(std::span<const VertexId> members);
  void set_root(VertexId v);

 private:
  friend class Recompressor;

  TreeMode mode_;
  std::vector<DagVertex> vertices_;
  std::optional<VertexId> root_;
  bool artificial_root_ = false;
};

// Cost accounting of one recompression run.
struct RecompressStats {
  // Child-edge inspections plus comparisons spent sorting children.
  std::uint64_t inspections = 0;
  // Number of vertices removed at each examined height.
  std::vector<std::size_t> merged_per_height;
  // Height at which the pass stopped because nothing could be merged, if it did.
  std::optional<std::uint32_t> stop_height;
};

Dag reduce(const Tree& tree, const TreeMode& mode);
// Expands the DAG below its single root; unordered edges expand to
// `multiplicity` copies. Throws std::invalid_argument on several roots.
Tree expand(const Dag& dag);
Tree expand(const Dag& dag, VertexId v);

// Places the members, in order, below an artificial root. Vertices of
// different members are not merged yet.
Dag build_superdag(std::span<const Dag> forest);
// Bottom-up merge of vertices with identical children, stopping at the first
// height where nothing merges. Surviving vertices keep their relative order.
Dag recompress(const Dag& superdag, RecompressStats* stats = nullptr);
// Adds `newcomer` as the last member of an already recompressed forest.
Dag add_to_forest(const Dag& reduced, const Dag& newcomer, RecompressStats* stats = nullptr);
// recompress(build_superdag(reduce(T_1), ..., reduce(T_N))).
Dag reduce_forest(std::span<const Tree> forest, const TreeMode& mode);

// Structural problems (bad heights, dangling children, ...) or nullopt.
std::optional<std::string> validate(const Dag& dag);
// No two vertices share label and children structure.
bool is_reduced(const Dag& dag);

// Canonical signature of every vertex's subtree, indexed by vertex id.
// Computed on the DAG itself, without expansion.
std::vector<Signature> dag_signatures(const Dag& dag);

// Text form: a header line, then "id height label? -> (child,mult)*" per
// vertex, sorted by (height, id).
std::string write_dag_text(const Dag& dag, const Alphabet* alphabet = nullptr);
Dag read_dag_text(std::string_view text, Alphabet& alphabet);

}  // namespace stk
