#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "subtree_kernel/dag.hpp"

namespace stk {

// Dataset members are indexed 0..N-1 in the order of the artificial root's edges.
using MemberId = std::uint32_t;

struct FreqEntry {
  MemberId member = 0;
  std::uint64_t count = 0;

  friend bool operator==(const FreqEntry&, const FreqEntry&) = default;
};

// Sparse frequency vector sorted by member, zero entries omitted.
using FreqVector = std::vector<FreqEntry>;

// Number of full DAG explorations performed by each annotation pass.
struct TraversalCounters {
  std::uint64_t origins = 0;
  std::uint64_t frequencies = 0;
  std::uint64_t matching = 0;
};

// Origin sets (sorted member lists), one per vertex. Top-down by decreasing
// height; a vertex also gets member i when it is the target of root edge i.
// Throws std::invalid_argument when the DAG has no artificial root.
std::vector<std::vector<MemberId>> compute_origins(const Dag& dag);

// p_v(i) for every vertex; repeated ordered edges are counted separately.
std::vector<FreqVector> compute_frequencies(const Dag& dag);

// M(i, j) for i <= j. Built in one pass when N is at most `threshold`,
// otherwise answered on demand from per-member vertex lists.
class MatchingMap {
 public:
  MatchingMap() = default;
  MatchingMap(std::span<const std::vector<MemberId>> origins, std::size_t member_count,
              std::size_t threshold = 512);

  std::size_t member_count() const { return n_; }
  bool materialized() const { return materialized_; }

  // Calls fn(v) for each v in M(i, j), in increasing vertex order.
  void for_each_match(MemberId i, MemberId j, const std::function<void(VertexId)>& fn) const;
  std::vector<VertexId> matching(MemberId i, MemberId j) const;
  std::size_t match_count(MemberId i, MemberId j) const;
  // Vertices of D_i, i.e. M(i, i).
  std::span<const VertexId> member_vertices(MemberId i) const;

 private:
  std::size_t pair_index(MemberId i, MemberId j) const;

  std::size_t n_ = 0;
  bool materialized_ = false;
  std::vector<std::vector<VertexId>> per_member_;
  std::vector<std::vector<VertexId>> pairs_;
};

// A recompressed forest DAG with its three annotations. Immutable once built.
class AnnotatedDag {
 public:
  explicit AnnotatedDag(Dag dag, std::size_t matching_threshold = 512);

  const Dag& dag() const { return dag_; }
  std::size_t member_count() const { return dag_.member_count(); }

  std::span<const MemberId> origins(VertexId v) const { return origins_.at(v); }
  const std::vector<std::vector<MemberId>>& all_origins() const { return origins_; }
  const FreqVector& frequency(VertexId v) const { return freq_.at(v); }
  std::uint64_t count(VertexId v, MemberId i) const;
  const MatchingMap& matching() const { return matching_; }
  const TraversalCounters& counters() const { return counters_; }

 private:
  Dag dag_;
  std::vector<std::vector<MemberId>> origins_;
  std::vector<FreqVector> freq_;
  MatchingMap matching_;
  TraversalCounters counters_;
};

AnnotatedDag annotate(std::span<const Tree> forest, const TreeMode& mode,
                      std::size_t matching_threshold = 512);

}  // namespace stk
