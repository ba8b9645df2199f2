// Shape-derived weights shared by the kernel tests and the acceptance run.
#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "oracles.hpp"
#include "subtree_kernel/kernel.hpp"

namespace shape_weights {

// Per-vertex weights of a DAG from a shape function of the expanded subtree.
template <class W>
std::vector<double> on_dag(const stk::Dag& dag, W w) {
  std::vector<double> out(dag.size(), 0.0);
  for (stk::VertexId v = 0; v < dag.size(); ++v) {
    if (dag.has_artificial_root() && v == dag.root()) continue;
    stk::Tree t = stk::expand(dag, v);
    out[v] = static_cast<double>(w(t, t.root()));
  }
  return out;
}

// The same weights keyed by signature, for kernel_brute.
template <class W>
stk::SubtreeWeight by_signature(const std::vector<stk::Tree>& forest, const stk::TreeMode& mode, W w) {
  auto table = std::make_shared<std::unordered_map<stk::Signature, double>>();
  for (const stk::Tree& t : forest) {
    auto sig = stk::subtree_signatures(t, mode);
    for (stk::VertexId v = 0; v < t.size(); ++v) (*table)[sig[v]] = static_cast<double>(w(t, v));
  }
  return [table](const stk::Signature& s, std::uint32_t) { return table->at(s); };
}

}  // namespace shape_weights
