#include "subtree_kernel/dag.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "subtree_kernel/errors.hpp"

namespace stk {

namespace {

// Merge key of a vertex: label (when labeled) followed by its children
// structure. Compared as a whole, so the flat encoding is unambiguous.
using MergeKey = std::vector<std::uint64_t>;

struct MergeKeyHash {
  std::size_t operator()(const MergeKey& key) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t x : key) {
      h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

MergeKey make_key(const TreeMode& mode, Symbol label, const std::vector<DagEdge>& children) {
  MergeKey key;
  key.reserve(1 + 2 * children.size());
  key.push_back(mode.labeled ? static_cast<std::uint64_t>(static_cast<std::int64_t>(label) + 1) : 0);
  for (const DagEdge& e : children) {
    key.push_back(e.child);
    if (!mode.ordered()) key.push_back(e.multiplicity);
  }
  return key;
}

// Sorts unordered edges by child id and folds repeated children into one
// edge. `comparisons` counts the comparator calls.
void normalize_unordered(std::vector<DagEdge>& edges, std::uint64_t* comparisons = nullptr) {
  std::sort(edges.begin(), edges.end(), [comparisons](const DagEdge& a, const DagEdge& b) {
    if (comparisons) ++*comparisons;
    return a.child < b.child;
  });
  std::size_t out = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (out > 0 && edges[out - 1].child == edges[i].child) {
      edges[out - 1].multiplicity += edges[i].multiplicity;
    } else {
      edges[out++] = edges[i];
    }
  }
  edges.resize(out);
}

}  // namespace

const DagVertex& Dag::vertex(VertexId v) const {
  if (v >= vertices_.size()) throw std::out_of_range("DAG vertex " + std::to_string(v) + " out of range");
  return vertices_[v];
}

VertexId Dag::root() const {
  if (!root_) throw std::logic_error("DAG has no root");
  return *root_;
}

std::vector<VertexId> Dag::member_roots() const {
  if (!artificial_root_) throw std::invalid_argument("DAG has no artificial root");
  std::vector<VertexId> out;
  for (const DagEdge& e : vertices_[*root_].children) out.push_back(e.child);
  return out;
}

std::size_t Dag::member_count() const {
  return artificial_root_ ? vertices_[*root_].children.size() : 0;
}

std::vector<VertexId> Dag::parentless() const {
  std::vector<bool> has_parent(vertices_.size(), false);
  for (const DagVertex& v : vertices_)
    for (const DagEdge& e : v.children) has_parent[e.child] = true;
  std::vector<VertexId> out;
  for (VertexId v = 0; v < vertices_.size(); ++v)
    if (!has_parent[v]) out.push_back(v);
  return out;
}

VertexId Dag::add_vertex(Symbol label, std::vector<DagEdge> children) {
  std::uint32_t h = 0;
  for (const DagEdge& e : children) {
    if (e.child >= vertices_.size())
      throw std::invalid_argument("DAG child " + std::to_string(e.child) + " does not exist yet");
    if (e.multiplicity == 0) throw std::invalid_argument("DAG edge multiplicity must be positive");
    if (mode_.ordered() && e.multiplicity != 1)
      throw std::invalid_argument("ordered DAG edges have multiplicity 1");
    h = std::max(h, vertices_[e.child].height + 1);
  }
  if (!mode_.ordered()) normalize_unordered(children);
  auto id = static_cast<VertexId>(vertices_.size());
  vertices_.push_back(DagVertex{h, label, std::move(children)});
  root_ = id;
  artificial_root_ = false;
  return id;
}

VertexId Dag::add_vertex(Symbol label, std::span<const VertexId> children) {
  std::vector<DagEdge> edges;
  edges.reserve(children.size());
  for (VertexId c : children) edges.push_back(DagEdge{c, 1});
  return add_vertex(label, std::move(edges));
}

VertexId Dag::add_artificial_root(std::span<const VertexId> members) {
  std::uint32_t h = 0;
  std::vector<DagEdge> edges;
  for (VertexId m : members) {
    if (m >= vertices_.size()) throw std::invalid_argument("member root does not exist");
    h = std::max(h, vertices_[m].height + 1);
    edges.push_back(DagEdge{m, 1});
  }
  auto id = static_cast<VertexId>(vertices_.size());
  vertices_.push_back(DagVertex{h, kNoLabel, std::move(edges)});
  root_ = id;
  artificial_root_ = true;
  return id;
}

void Dag::set_root(VertexId v) {
  vertex(v);
  root_ = v;
  artificial_root_ = false;
}

Dag reduce(const Tree& tree, const TreeMode& mode) {
  Dag dag(mode);
  std::unordered_map<MergeKey, VertexId, MergeKeyHash> classes;
  std::vector<VertexId> class_of(tree.size());
  for (VertexId v : tree.postorder()) {
    std::vector<DagEdge> edges;
    edges.reserve(tree.children(v).size());
    for (VertexId c : tree.children(v)) edges.push_back(DagEdge{class_of[c], 1});
    if (!mode.ordered()) normalize_unordered(edges);
    Symbol label = mode.labeled ? tree.label(v) : kNoLabel;
    MergeKey key = make_key(mode, label, edges);
    auto it = classes.find(key);
    if (it != classes.end()) {
      class_of[v] = it->second;
      continue;
    }
    VertexId id = dag.add_vertex(label, std::move(edges));
    classes.emplace(std::move(key), id);
    class_of[v] = id;
  }
  dag.set_root(class_of[tree.root()]);
  return dag;
}

Tree expand(const Dag& dag, VertexId v) {
  const DagVertex& top = dag.vertex(v);
  Tree tree(top.label);
  // (DAG vertex, tree vertex) pairs whose children still need expanding.
  std::vector<std::pair<VertexId, VertexId>> stack{{v, tree.root()}};
  while (!stack.empty()) {
    auto [d, t] = stack.back();
    stack.pop_back();
    std::vector<std::pair<VertexId, VertexId>> pending;
    for (const DagEdge& e : dag.vertex(d).children) {
      for (std::uint32_t k = 0; k < e.multiplicity; ++k) {
        VertexId child = tree.add_child(t, dag.vertex(e.child).label);
        pending.emplace_back(e.child, child);
      }
    }
    stack.insert(stack.end(), pending.rbegin(), pending.rend());
  }
  return tree;
}

Tree expand(const Dag& dag) {
  auto tops = dag.parentless();
  if (tops.size() != 1)
    throw std::invalid_argument("cannot expand a DAG with " + std::to_string(tops.size()) + " roots");
  return expand(dag, tops.front());
}

Dag build_superdag(std::span<const Dag> forest) {
  if (forest.empty()) throw std::invalid_argument("cannot build a super-DAG from an empty forest");
  const TreeMode mode = forest.front().mode();
  Dag out(mode);
  std::vector<VertexId> members;
  for (const Dag& member : forest) {
    if (!(member.mode() == mode)) throw std::invalid_argument("forest members disagree on tree mode");
    if (member.has_artificial_root()) throw std::invalid_argument("forest members must be single-tree DAGs");
    auto offset = static_cast<VertexId>(out.size());
    for (const DagVertex& v : member.vertices()) {
      std::vector<DagEdge> edges = v.children;
      for (DagEdge& e : edges) e.child += offset;
      out.add_vertex(v.label, std::move(edges));
    }
    members.push_back(member.root() + offset);
  }
  out.add_artificial_root(members);
  return out;
}

class Recompressor {
 public:
  Recompressor(const Dag& input, RecompressStats* stats)
      : mode_(input.mode()), vertices_(input.vertices_), root_(input.root()), stats_(stats) {
    if (!input.has_artificial_root()) throw std::invalid_argument("recompress expects a super-DAG");
    alive_.assign(vertices_.size(), true);
    redirect_.resize(vertices_.size());
    for (VertexId v = 0; v < vertices_.size(); ++v) redirect_[v] = v;
  }

  Dag run() {
    const std::uint32_t top = vertices_[root_].height;
    // One exploration to bucket vertices by height; ids stay increasing.
    std::vector<std::vector<VertexId>> strata(top + 1);
    for (VertexId v = 0; v < vertices_.size(); ++v) strata[vertices_[v].height].push_back(v);

    std::uint32_t h = 0;
    for (; h < top; ++h) {
      std::unordered_map<MergeKey, VertexId, MergeKeyHash> representative;
      std::size_t merged = 0;
      for (VertexId v : strata[h]) {
        resolve_children(v);
        MergeKey key = make_key(mode_, vertices_[v].label, vertices_[v].children);
        auto [it, inserted] = representative.try_emplace(std::move(key), v);
        if (!inserted) {
          // Strata are visited in id order: the kept vertex has the smallest id.
          redirect_[v] = it->second;
          alive_[v] = false;
          ++merged;
        }
      }
      if (stats_) stats_->merged_per_height.push_back(merged);
      if (merged == 0) {
        if (stats_) stats_->stop_height = h;
        break;
      }
    }
    // Rewire everything above the last examined height.
    for (std::uint32_t g = h + (h < top ? 1 : 0); g <= top; ++g)
      for (VertexId v : strata[g]) resolve_children(v);
    return compact();
  }

 private:
  void resolve_children(VertexId v) {
    auto& edges = vertices_[v].children;
    bool changed = false;
    for (DagEdge& e : edges) {
      count(1);
      VertexId target = redirect_[e.child];
      if (target != e.child) {
        e.child = target;
        changed = true;
      }
    }
    if (changed && !mode_.ordered() && v != root_) {
      std::uint64_t comparisons = 0;
      normalize_unordered(edges, &comparisons);
      count(comparisons);
    }
  }

  void count(std::uint64_t n) {
    if (stats_) stats_->inspections += n;
  }

  Dag compact() const {
    Dag out(mode_);
    std::vector<VertexId> renamed(vertices_.size(), 0);
    std::vector<VertexId> members;
    for (VertexId v = 0; v < vertices_.size(); ++v) {
      if (!alive_[v]) continue;
      std::vector<DagEdge> edges = vertices_[v].children;
      for (DagEdge& e : edges) e.child = renamed[e.child];
      if (v == root_) {
        for (const DagEdge& e : edges) members.push_back(e.child);
        continue;
      }
      renamed[v] = out.add_vertex(vertices_[v].label, std::move(edges));
    }
    out.add_artificial_root(members);
    return out;
  }

  TreeMode mode_;
  std::vector<DagVertex> vertices_;
  VertexId root_;
  RecompressStats* stats_;
  std::vector<bool> alive_;
  std::vector<VertexId> redirect_;
};

Dag recompress(const Dag& superdag, RecompressStats* stats) {
  return Recompressor(superdag, stats).run();
}

Dag add_to_forest(const Dag& reduced, const Dag& newcomer, RecompressStats* stats) {
  if (!reduced.has_artificial_root() || reduced.member_count() == 0)
    throw std::invalid_argument("add_to_forest needs a non-empty recompressed forest");
  if (!(reduced.mode() == newcomer.mode())) throw std::invalid_argument("tree mode mismatch");
  if (newcomer.has_artificial_root()) throw std::invalid_argument("newcomer must be a single-tree DAG");

  Dag extended(reduced.mode());
  const VertexId old_root = reduced.root();
  std::vector<VertexId> renamed(reduced.size(), 0);
  for (VertexId v = 0; v < reduced.size(); ++v) {
    if (v == old_root) continue;
    std::vector<DagEdge> edges = reduced.vertex(v).children;
    for (DagEdge& e : edges) e.child = renamed[e.child];
    renamed[v] = extended.add_vertex(reduced.vertex(v).label, std::move(edges));
  }
  std::vector<VertexId> members;
  for (VertexId m : reduced.member_roots()) members.push_back(renamed[m]);
  auto offset = static_cast<VertexId>(extended.size());
  for (const DagVertex& v : newcomer.vertices()) {
    std::vector<DagEdge> edges = v.children;
    for (DagEdge& e : edges) e.child += offset;
    extended.add_vertex(v.label, std::move(edges));
  }
  members.push_back(newcomer.root() + offset);
  extended.add_artificial_root(members);
  return recompress(extended, stats);
}

Dag reduce_forest(std::span<const Tree> forest, const TreeMode& mode) {
  std::vector<Dag> dags;
  dags.reserve(forest.size());
  for (const Tree& t : forest) dags.push_back(reduce(t, mode));
  return recompress(build_superdag(dags));
}

std::optional<std::string> validate(const Dag& dag) {
  if (!dag.has_root()) return "no root";
  for (VertexId v = 0; v < dag.size(); ++v) {
    const DagVertex& x = dag.vertex(v);
    std::uint32_t h = 0;
    for (const DagEdge& e : x.children) {
      if (e.child >= dag.size()) return "vertex " + std::to_string(v) + " has a dangling child";
      if (e.multiplicity == 0) return "vertex " + std::to_string(v) + " has a zero multiplicity";
      const DagVertex& c = dag.vertex(e.child);
      if (c.height >= x.height) return "edge " + std::to_string(v) + "->" + std::to_string(e.child) + " does not descend";
      h = std::max(h, c.height + 1);
    }
    if (h != x.height) return "vertex " + std::to_string(v) + " has inconsistent height";
    bool is_artificial = dag.has_artificial_root() && v == dag.root();
    if (!dag.mode().ordered() && !is_artificial) {
      for (std::size_t i = 1; i < x.children.size(); ++i)
        if (x.children[i - 1].child >= x.children[i].child)
          return "unordered vertex " + std::to_string(v) + " has unsorted or repeated children";
    }
  }
  auto tops = dag.parentless();
  if (tops.size() != 1 || tops.front() != dag.root()) return "root is not the unique parentless vertex";
  return std::nullopt;
}

bool is_reduced(const Dag& dag) {
  std::unordered_map<MergeKey, VertexId, MergeKeyHash> seen;
  for (VertexId v = 0; v < dag.size(); ++v) {
    if (dag.has_artificial_root() && v == dag.root()) continue;
    std::vector<DagEdge> edges = dag.vertex(v).children;
    if (!dag.mode().ordered()) normalize_unordered(edges);
    if (!seen.emplace(make_key(dag.mode(), dag.vertex(v).label, edges), v).second) return false;
  }
  return true;
}

std::vector<Signature> dag_signatures(const Dag& dag) {
  // Ids need not be topologically sorted, so visit by increasing height.
  std::vector<VertexId> order(dag.size());
  for (VertexId v = 0; v < dag.size(); ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
    return dag.vertex(a).height < dag.vertex(b).height;
  });
  const TreeMode& mode = dag.mode();
  std::vector<std::string> codes(dag.size());
  for (VertexId v : order) {
    const DagVertex& x = dag.vertex(v);
    std::string code;
    if (mode.labeled && x.label != kNoLabel) code += std::to_string(x.label);
    code += '(';
    std::vector<const std::string*> parts;
    for (const DagEdge& e : x.children)
      for (std::uint32_t k = 0; k < e.multiplicity; ++k) parts.push_back(&codes[e.child]);
    if (!mode.ordered()) std::sort(parts.begin(), parts.end(), [](auto* a, auto* b) { return *a < *b; });
    for (auto* p : parts) code += *p;
    code += ')';
    codes[v] = std::move(code);
  }
  std::vector<Signature> out;
  out.reserve(codes.size());
  for (auto& c : codes) out.emplace_back(std::move(c));
  return out;
}

std::string write_dag_text(const Dag& dag, const Alphabet* alphabet) {
  std::ostringstream out;
  out << "# dag " << (dag.mode().ordered() ? "ordered" : "unordered") << ' '
      << (dag.mode().labeled ? "labeled" : "unlabeled") << " root=" << dag.root() << ' '
      << (dag.has_artificial_root() ? "forest" : "tree") << '\n';
  std::vector<VertexId> order(dag.size());
  for (VertexId v = 0; v < dag.size(); ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
    return dag.vertex(a).height < dag.vertex(b).height;
  });
  for (VertexId v : order) {
    const DagVertex& x = dag.vertex(v);
    out << v << ' ' << x.height;
    if (x.label != kNoLabel) {
      if (alphabet) {
        out << ' ' << alphabet->name(x.label);
      } else {
        out << " #" << x.label;
      }
    }
    out << " ->";
    for (const DagEdge& e : x.children) out << " (" << e.child << ',' << e.multiplicity << ')';
    out << '\n';
  }
  return out.str();
}

namespace {

std::uint32_t parse_uint(std::string_view token, std::size_t line) {
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError("expected an unsigned integer, got '" + std::string(token) + "'", line, 1);
  return value;
}

}  // namespace

Dag read_dag_text(std::string_view text, Alphabet& alphabet) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::optional<TreeMode> mode;
  std::optional<VertexId> root;
  bool forest = false;

  struct Record {
    std::uint32_t height;
    Symbol label;
    std::vector<DagEdge> children;
  };
  std::map<VertexId, Record> records;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream words(line);
    std::vector<std::string> tokens;
    for (std::string t; words >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    if (tokens[0] == "#") {
      if (tokens.size() < 5 || tokens[1] != "dag") throw ParseError("malformed DAG header", line_no, 1);
      TreeMode m;
      if (tokens[2] == "ordered") m.order = Order::ordered;
      else if (tokens[2] == "unordered") m.order = Order::unordered;
      else throw ParseError("unknown order '" + tokens[2] + "'", line_no, 1);
      m.labeled = tokens[3] == "labeled";
      if (tokens[4].rfind("root=", 0) != 0) throw ParseError("missing root=", line_no, 1);
      root = parse_uint(std::string_view(tokens[4]).substr(5), line_no);
      forest = tokens.size() > 5 && tokens[5] == "forest";
      mode = m;
      continue;
    }
    if (!mode) throw ParseError("vertex line before DAG header", line_no, 1);
    if (tokens.size() < 3) throw ParseError("truncated vertex line", line_no, 1);
    VertexId id = parse_uint(tokens[0], line_no);
    Record rec{parse_uint(tokens[1], line_no), kNoLabel, {}};
    std::size_t k = 2;
    if (tokens[k] != "->") {
      if (mode->labeled) rec.label = alphabet.intern(tokens[k]);
      ++k;
    }
    if (k >= tokens.size() || tokens[k] != "->") throw ParseError("expected '->'", line_no, 1);
    for (++k; k < tokens.size(); ++k) {
      const std::string& t = tokens[k];
      auto comma = t.find(',');
      if (t.size() < 5 || t.front() != '(' || t.back() != ')' || comma == std::string::npos)
        throw ParseError("malformed edge '" + t + "'", line_no, 1);
      DagEdge e{parse_uint(std::string_view(t).substr(1, comma - 1), line_no),
                parse_uint(std::string_view(t).substr(comma + 1, t.size() - comma - 2), line_no)};
      rec.children.push_back(e);
    }
    if (!records.emplace(id, std::move(rec)).second)
      throw ParseError("duplicate vertex id " + std::to_string(id), line_no, 1);
  }
  if (!mode || !root) throw ParseError("missing DAG header", 0, 0);

  // Ids must be dense; vertices are rebuilt in height order so children exist first.
  if (!records.empty() && records.rbegin()->first != records.size() - 1)
    throw ParseError("DAG vertex ids must be 0..n-1", 0, 0);
  std::vector<VertexId> order;
  for (auto& [id, rec] : records) order.push_back(id);
  std::stable_sort(order.begin(), order.end(),
                   [&](VertexId a, VertexId b) { return records[a].height < records[b].height; });
  // Preserve ids: build a permutation so vertex `id` ends up at index `id`.
  // Children always have smaller heights, hence are placed earlier in `order`,
  // but not necessarily at smaller ids, so we rename and map back.
  Dag dag(*mode);
  std::vector<VertexId> placed(records.size());
  for (VertexId id : order) {
    const Record& rec = records[id];
    std::vector<DagEdge> edges = rec.children;
    for (DagEdge& e : edges) {
      if (!records.count(e.child)) throw ParseError("edge to unknown vertex", 0, 0);
      e.child = placed[e.child];
    }
    if (forest && id == *root) {
      std::vector<VertexId> members;
      for (const DagEdge& e : edges) members.push_back(e.child);
      placed[id] = dag.add_artificial_root(members);
    } else {
      placed[id] = dag.add_vertex(rec.label, std::move(edges));
    }
    if (dag.vertex(placed[id]).height != rec.height)
      throw ParseError("height of vertex " + std::to_string(id) + " is inconsistent", 0, 0);
  }
  if (forest) {
    if (!dag.has_artificial_root() || dag.root() != placed[*root])
      throw ParseError("forest root must be the highest vertex", 0, 0);
  } else {
    dag.set_root(placed[*root]);
  }
  return dag;
}

}  // namespace stk
