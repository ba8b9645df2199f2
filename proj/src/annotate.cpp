#include "subtree_kernel/annotate.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace stk {

namespace {

// Vertex ids by decreasing height (counting sort, stable in id).
std::vector<VertexId> top_down_order(const Dag& dag) {
  const std::uint32_t top = dag.height();
  std::vector<std::vector<VertexId>> strata(top + 1);
  for (VertexId v = 0; v < dag.size(); ++v) strata[dag.vertex(v).height].push_back(v);
  std::vector<VertexId> order;
  order.reserve(dag.size());
  for (std::uint32_t h = top + 1; h-- > 0;) order.insert(order.end(), strata[h].begin(), strata[h].end());
  return order;
}

void require_forest(const Dag& dag) {
  if (!dag.has_root() || !dag.has_artificial_root())
    throw std::invalid_argument("annotation needs a forest DAG with an artificial root");
}

}  // namespace

std::vector<std::vector<MemberId>> compute_origins(const Dag& dag) {
  require_forest(dag);
  std::vector<std::vector<MemberId>> origins(dag.size());
  const VertexId root = dag.root();
  const auto& root_edges = dag.vertex(root).children;
  for (MemberId i = 0; i < root_edges.size(); ++i) origins[root_edges[i].child].push_back(i);

  for (VertexId v : top_down_order(dag)) {
    if (v == root) continue;
    auto& own = origins[v];
    std::sort(own.begin(), own.end());
    own.erase(std::unique(own.begin(), own.end()), own.end());
    for (const DagEdge& e : dag.vertex(v).children) {
      auto& below = origins[e.child];
      below.insert(below.end(), own.begin(), own.end());
    }
  }
  return origins;
}

std::vector<FreqVector> compute_frequencies(const Dag& dag) {
  require_forest(dag);
  std::vector<FreqVector> freq(dag.size());
  const VertexId root = dag.root();
  const auto& root_edges = dag.vertex(root).children;
  for (MemberId i = 0; i < root_edges.size(); ++i) freq[root_edges[i].child].push_back(FreqEntry{i, 1});

  for (VertexId v : top_down_order(dag)) {
    if (v == root) continue;
    // Contributions pushed by the parents are coalesced here, once all parents are done.
    auto& own = freq[v];
    std::sort(own.begin(), own.end(), [](const FreqEntry& a, const FreqEntry& b) { return a.member < b.member; });
    std::size_t out = 0;
    for (std::size_t k = 0; k < own.size(); ++k) {
      if (out > 0 && own[out - 1].member == own[k].member) {
        own[out - 1].count += own[k].count;
      } else {
        own[out++] = own[k];
      }
    }
    own.resize(out);
    for (const DagEdge& e : dag.vertex(v).children) {
      auto& below = freq[e.child];
      for (const FreqEntry& f : own) below.push_back(FreqEntry{f.member, f.count * e.multiplicity});
    }
  }
  return freq;
}

MatchingMap::MatchingMap(std::span<const std::vector<MemberId>> origins, std::size_t member_count,
                         std::size_t threshold)
    : n_(member_count), materialized_(member_count <= threshold), per_member_(member_count) {
  for (VertexId v = 0; v < origins.size(); ++v)
    for (MemberId i : origins[v]) per_member_.at(i).push_back(v);
  if (!materialized_) return;
  pairs_.resize(n_ * (n_ + 1) / 2);
  for (VertexId v = 0; v < origins.size(); ++v) {
    const auto& o = origins[v];
    for (std::size_t a = 0; a < o.size(); ++a)
      for (std::size_t b = a; b < o.size(); ++b) pairs_[pair_index(o[a], o[b])].push_back(v);
  }
}

std::size_t MatchingMap::pair_index(MemberId i, MemberId j) const {
  if (i > j) std::swap(i, j);
  // Row-major upper triangle.
  return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i - 1) / 2 + (j - i);
}

void MatchingMap::for_each_match(MemberId i, MemberId j, const std::function<void(VertexId)>& fn) const {
  if (i >= n_ || j >= n_)
    throw std::out_of_range("member index out of range: (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  if (materialized_) {
    for (VertexId v : pairs_[pair_index(i, j)]) fn(v);
    return;
  }
  const auto& a = per_member_[std::min(i, j)];
  const auto& b = per_member_[std::max(i, j)];
  std::size_t p = 0, q = 0;
  while (p < a.size() && q < b.size()) {
    if (a[p] < b[q]) {
      ++p;
    } else if (b[q] < a[p]) {
      ++q;
    } else {
      fn(a[p]);
      ++p;
      ++q;
    }
  }
}

std::vector<VertexId> MatchingMap::matching(MemberId i, MemberId j) const {
  std::vector<VertexId> out;
  for_each_match(i, j, [&](VertexId v) { out.push_back(v); });
  return out;
}

std::size_t MatchingMap::match_count(MemberId i, MemberId j) const {
  if (materialized_ && i < n_ && j < n_) return pairs_[pair_index(i, j)].size();
  std::size_t n = 0;
  for_each_match(i, j, [&](VertexId) { ++n; });
  return n;
}

std::span<const VertexId> MatchingMap::member_vertices(MemberId i) const { return per_member_.at(i); }

AnnotatedDag::AnnotatedDag(Dag dag, std::size_t matching_threshold) : dag_(std::move(dag)) {
  origins_ = compute_origins(dag_);
  ++counters_.origins;
  freq_ = compute_frequencies(dag_);
  ++counters_.frequencies;
  matching_ = MatchingMap(origins_, dag_.member_count(), matching_threshold);
  ++counters_.matching;
}

std::uint64_t AnnotatedDag::count(VertexId v, MemberId i) const {
  const FreqVector& f = freq_.at(v);
  auto it = std::lower_bound(f.begin(), f.end(), i, [](const FreqEntry& e, MemberId m) { return e.member < m; });
  return it != f.end() && it->member == i ? it->count : 0;
}

AnnotatedDag annotate(std::span<const Tree> forest, const TreeMode& mode, std::size_t matching_threshold) {
  if (forest.empty()) throw std::invalid_argument("cannot annotate an empty dataset");
  return AnnotatedDag(reduce_forest(forest, mode), matching_threshold);
}

}  // namespace stk
