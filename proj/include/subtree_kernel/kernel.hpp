#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "subtree_kernel/annotate.hpp"

namespace stk {

// Weight of a subtree class, given its canonical signature and height.
using SubtreeWeight = std::function<double(const Signature&, std::uint32_t height)>;

struct SubtreeClassCount {
  std::uint64_t count = 0;
  std::uint32_t height = 0;
};

// N_tau(T) for every subtree class tau of T.
std::unordered_map<Signature, SubtreeClassCount> subtree_profile(const Tree& tree, const TreeMode& mode);

// Enumerates common subtree classes explicitly; the reference kernel.
double kernel_brute(const Tree& t1, const Tree& t2, const TreeMode& mode, const SubtreeWeight& w);

// Sum over M(i, j) of w_v p_v(i) p_v(j). Symmetric bit for bit.
double kernel_dag(const AnnotatedDag& annotated, std::span<const double> weights, MemberId i, MemberId j);

// Sum with pairwise splitting above 10^4 terms.
double stable_sum(std::span<const double> terms);

struct GramMatrix {
  std::vector<MemberId> rows;
  std::vector<MemberId> cols;
  std::vector<double> values;  // row-major
  bool square = false;

  double at(std::size_t r, std::size_t c) const { return values[r * cols.size() + c]; }
};

// Entrywise kernel_dag. When rows == cols only the upper triangle is computed.
// threads = 0 picks the hardware concurrency.
GramMatrix gram(const AnnotatedDag& annotated, std::span<const double> weights, std::span<const MemberId> rows,
                std::span<const MemberId> cols, unsigned threads = 0);

// Header row of column indices; the first column holds the row index.
std::string gram_csv(const GramMatrix& g);

// Annotation computed once; weights swapped between Gram computations.
class KernelEngine {
 public:
  explicit KernelEngine(const AnnotatedDag& annotated, std::vector<double> weights = {});

  // Throws std::invalid_argument on a size mismatch.
  void reweight(std::vector<double> weights);
  const std::vector<double>& weights() const { return weights_; }
  const AnnotatedDag& annotated() const { return annotated_; }

  double kernel(MemberId i, MemberId j) const;
  GramMatrix gram(std::span<const MemberId> rows, std::span<const MemberId> cols, unsigned threads = 0) const;

  // Matching vertices visited by all kernel evaluations so far.
  std::uint64_t visited() const { return visited_.load(); }

 private:
  const AnnotatedDag& annotated_;
  std::vector<double> weights_;
  mutable std::atomic<std::uint64_t> visited_{0};
};

}  // namespace stk
