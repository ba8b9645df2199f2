#include "subtree_kernel/viz.hpp"

#include <array>
#include <sstream>
#include <stdexcept>

namespace stk {

namespace {

constexpr std::array<const char*, 8> kSaturated{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr std::array<const char*, 8> kLight{"#aec7e8", "#ff9896", "#98df8a", "#ffbb78",
                                            "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string presence_color(std::size_t k) { return kSaturated[k % kSaturated.size()]; }
std::string absence_color(std::size_t k) { return kLight[k % kLight.size()]; }

std::string dag_to_dot(const Dag& dag, std::span<const double> weights, const ClassProfile& profile,
                       const DotOptions& options) {
  if (weights.size() != dag.size()) throw std::invalid_argument("weight table size differs from DAG size");
  if (profile.delta.size() != dag.size()) throw std::invalid_argument("class profile does not match the DAG");
  if (!(options.min_width >= 0.0 && options.min_width <= 2.0)) throw std::invalid_argument("min_width must lie in [0, 2]");
  const bool skip_root = dag.has_artificial_root();
  const VertexId root = dag.has_root() ? dag.root() : 0;

  std::ostringstream out;
  out.precision(6);
  out << "digraph dag {\n  node [shape=circle, style=filled, fixedsize=true, label=\"\"];\n";
  for (VertexId v = 0; v < dag.size(); ++v) {
    if (skip_root && v == root) continue;
    NearestPoint np = nearest_point(profile.rho_of(v));
    double width = options.min_width + (2.0 - options.min_width) * weights[v];
    out << "  v" << v << " [width=" << width << ", height=" << width << ", fillcolor=\""
        << (np.presence ? presence_color(np.k) : absence_color(np.k)) << "\"";
    if (options.alphabet && dag.vertex(v).label != kNoLabel)
      out << ", label=\"" << escape(options.alphabet->name(dag.vertex(v).label)) << "\"";
    out << "];\n";
  }
  for (VertexId v = 0; v < dag.size(); ++v) {
    if (skip_root && v == root) continue;
    for (const DagEdge& e : dag.vertex(v).children) {
      out << "  v" << v << " -> v" << e.child;
      if (!dag.mode().ordered()) out << " [label=\"" << e.multiplicity << "\"]";
      out << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace stk
