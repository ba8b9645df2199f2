#include "subtree_kernel/kernel.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace stk {

namespace {

constexpr std::size_t kPairwiseThreshold = 10000;

double pairwise(const double* x, std::size_t n) {
  if (n <= 128) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += x[k];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise(x, half) + pairwise(x + half, n - half);
}

double dag_sum(const AnnotatedDag& annotated, std::span<const double> weights, MemberId i, MemberId j,
               std::uint64_t* visited) {
  if (weights.size() != annotated.dag().size())
    throw std::invalid_argument("weight table size differs from DAG size");
  if (i > j) std::swap(i, j);
  const MatchingMap& m = annotated.matching();
  std::vector<double> terms;
  std::size_t expected = m.match_count(i, j);
  if (expected > kPairwiseThreshold) terms.reserve(expected);
  double plain = 0.0;
  std::uint64_t n = 0;
  m.for_each_match(i, j, [&](VertexId v) {
    double t = weights[v] * static_cast<double>(annotated.count(v, i)) * static_cast<double>(annotated.count(v, j));
    if (expected > kPairwiseThreshold) {
      terms.push_back(t);
    } else {
      plain += t;
    }
    ++n;
  });
  if (visited) *visited += n;
  return expected > kPairwiseThreshold ? stable_sum(terms) : plain;
}

}  // namespace

std::unordered_map<Signature, SubtreeClassCount> subtree_profile(const Tree& tree, const TreeMode& mode) {
  auto sigs = subtree_signatures(tree, mode);
  auto hs = heights(tree);
  std::unordered_map<Signature, SubtreeClassCount> out;
  for (VertexId v = 0; v < tree.size(); ++v) {
    auto& slot = out[sigs[v]];
    ++slot.count;
    slot.height = hs[v];
  }
  return out;
}

double kernel_brute(const Tree& t1, const Tree& t2, const TreeMode& mode, const SubtreeWeight& w) {
  auto a = subtree_profile(t1, mode);
  auto b = subtree_profile(t2, mode);
  // Sum in signature order so the result does not depend on hashing.
  std::vector<const Signature*> common;
  for (const auto& [sig, c] : a)
    if (b.count(sig)) common.push_back(&sig);
  std::sort(common.begin(), common.end(), [](auto* x, auto* y) { return *x < *y; });
  double total = 0.0;
  for (const Signature* s : common) {
    const auto& ca = a.at(*s);
    total += w(*s, ca.height) * static_cast<double>(ca.count) * static_cast<double>(b.at(*s).count);
  }
  return total;
}

double stable_sum(std::span<const double> terms) {
  if (terms.size() <= kPairwiseThreshold) {
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
  }
  return pairwise(terms.data(), terms.size());
}

double kernel_dag(const AnnotatedDag& annotated, std::span<const double> weights, MemberId i, MemberId j) {
  return dag_sum(annotated, weights, i, j, nullptr);
}

namespace {

GramMatrix gram_impl(const AnnotatedDag& annotated, std::span<const double> weights, std::span<const MemberId> rows,
                     std::span<const MemberId> cols, unsigned threads, std::atomic<std::uint64_t>* visited) {
  GramMatrix g;
  g.rows.assign(rows.begin(), rows.end());
  g.cols.assign(cols.begin(), cols.end());
  g.square = std::equal(rows.begin(), rows.end(), cols.begin(), cols.end());
  g.values.assign(rows.size() * cols.size(), 0.0);
  for (MemberId i : rows)
    if (i >= annotated.member_count()) throw std::out_of_range("row index out of range");
  for (MemberId j : cols)
    if (j >= annotated.member_count()) throw std::out_of_range("column index out of range");
  if (weights.size() != annotated.dag().size()) throw std::invalid_argument("weight table size differs from DAG size");

  // Cells are handed out row by row; each thread owns whole rows.
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(rows.size(), 1)));
  std::atomic<std::size_t> next_row{0};
  auto work = [&] {
    std::uint64_t seen = 0;
    for (std::size_t r; (r = next_row.fetch_add(1)) < rows.size();) {
      std::size_t first = g.square ? r : 0;
      for (std::size_t c = first; c < cols.size(); ++c)
        g.values[r * cols.size() + c] = dag_sum(annotated, weights, rows[r], cols[c], &seen);
    }
    if (visited) *visited += seen;
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (g.square)
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < r; ++c) g.values[r * cols.size() + c] = g.values[c * cols.size() + r];
  return g;
}

}  // namespace

GramMatrix gram(const AnnotatedDag& annotated, std::span<const double> weights, std::span<const MemberId> rows,
                std::span<const MemberId> cols, unsigned threads) {
  return gram_impl(annotated, weights, rows, cols, threads, nullptr);
}

std::string gram_csv(const GramMatrix& g) {
  std::ostringstream out;
  out.precision(17);
  out << "index";
  for (MemberId c : g.cols) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < g.rows.size(); ++r) {
    out << g.rows[r];
    for (std::size_t c = 0; c < g.cols.size(); ++c) out << ',' << g.at(r, c);
    out << '\n';
  }
  return out.str();
}

KernelEngine::KernelEngine(const AnnotatedDag& annotated, std::vector<double> weights) : annotated_(annotated) {
  if (weights.empty()) weights.assign(annotated.dag().size(), 1.0);
  reweight(std::move(weights));
}

void KernelEngine::reweight(std::vector<double> weights) {
  if (weights.size() != annotated_.dag().size())
    throw std::invalid_argument("weight table has " + std::to_string(weights.size()) + " entries, DAG has " +
                                std::to_string(annotated_.dag().size()) + " vertices");
  weights_ = std::move(weights);
}

double KernelEngine::kernel(MemberId i, MemberId j) const {
  std::uint64_t seen = 0;
  double k = dag_sum(annotated_, weights_, i, j, &seen);
  visited_ += seen;
  return k;
}

GramMatrix KernelEngine::gram(std::span<const MemberId> rows, std::span<const MemberId> cols, unsigned threads) const {
  return gram_impl(annotated_, weights_, rows, cols, threads, &visited_);
}

}  // namespace stk
