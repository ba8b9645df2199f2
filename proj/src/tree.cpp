#include "subtree_kernel/tree.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "subtree_kernel/errors.hpp"

namespace stk {

std::string to_string(const TreeMode& mode) {
  std::string s = mode.ordered() ? "ordered" : "unordered";
  if (mode.labeled) s += "+labeled";
  return s;
}

Symbol Alphabet::intern(std::string_view name) {
  if (auto found = find(name)) return *found;
  if (frozen_) throw std::invalid_argument("unknown label '" + std::string(name) + "'");
  if (name.empty()) throw std::invalid_argument("empty label");
  auto symbol = static_cast<Symbol>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), symbol);
  return symbol;
}

std::optional<Symbol> Alphabet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Alphabet::name(Symbol symbol) const {
  if (symbol < 0 || static_cast<std::size_t>(symbol) >= names_.size())
    throw std::out_of_range("symbol " + std::to_string(symbol) + " not in alphabet");
  return names_[static_cast<std::size_t>(symbol)];
}

Tree::Tree(Symbol root_label) { vertices_.push_back(Vertex{std::nullopt, {}, root_label}); }

const Tree::Vertex& Tree::at(VertexId v) const {
  if (!contains(v)) throw std::out_of_range("vertex " + std::to_string(v) + " not in tree");
  return vertices_[v];
}

VertexId Tree::add_child(VertexId parent, Symbol label) {
  if (!contains(parent)) throw std::out_of_range("vertex " + std::to_string(parent) + " not in tree");
  auto id = static_cast<VertexId>(vertices_.size());
  vertices_.push_back(Vertex{parent, {}, label});
  vertices_[parent].children.push_back(id);
  return id;
}

std::optional<VertexId> Tree::parent(VertexId v) const { return at(v).parent; }
std::span<const VertexId> Tree::children(VertexId v) const { return at(v).children; }
Symbol Tree::label(VertexId v) const { return at(v).label; }

bool Tree::has_labels() const {
  return std::any_of(vertices_.begin(), vertices_.end(),
                     [](const Vertex& x) { return x.label != kNoLabel; });
}

std::vector<VertexId> Tree::preorder(VertexId from) const {
  std::vector<VertexId> order;
  std::vector<VertexId> stack{from};
  at(from);
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    order.push_back(v);
    const auto& ch = vertices_[v].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

std::vector<VertexId> Tree::postorder(VertexId from) const {
  // Reverse of a root-right-left preorder.
  std::vector<VertexId> order;
  std::vector<VertexId> stack{from};
  at(from);
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (VertexId c : vertices_[v].children) stack.push_back(c);
  }
  std::reverse(order.begin(), order.end());
  return order;
}

std::vector<std::uint32_t> heights(const Tree& tree) {
  std::vector<std::uint32_t> h(tree.size(), 0);
  for (VertexId v : tree.postorder()) {
    for (VertexId c : tree.children(v)) h[v] = std::max(h[v], h[c] + 1);
  }
  return h;
}

std::uint32_t height(const Tree& tree, VertexId v) {
  std::uint32_t best = 0;
  std::vector<std::uint32_t> h(tree.size(), 0);
  for (VertexId u : tree.postorder(v)) {
    for (VertexId c : tree.children(u)) h[u] = std::max(h[u], h[c] + 1);
    best = h[u];
  }
  return best;
}

std::uint32_t height(const Tree& tree) { return height(tree, tree.root()); }

std::size_t outdegree(const Tree& tree) {
  std::size_t best = 0;
  for (VertexId v = 0; v < tree.size(); ++v) best = std::max(best, tree.children(v).size());
  return best;
}

std::vector<VertexId> leaves(const Tree& tree) {
  std::vector<VertexId> out;
  for (VertexId v : tree.preorder())
    if (tree.is_leaf(v)) out.push_back(v);
  return out;
}

std::size_t leaf_count(const Tree& tree, VertexId v) {
  std::size_t n = 0;
  for (VertexId u : tree.preorder(v))
    if (tree.is_leaf(u)) ++n;
  return n;
}

std::size_t leaf_count(const Tree& tree) { return leaf_count(tree, tree.root()); }

std::vector<VertexId> ancestors(const Tree& tree, VertexId v) {
  std::vector<VertexId> out;
  for (auto p = tree.parent(v); p; p = tree.parent(*p)) out.push_back(*p);
  return out;
}

std::vector<VertexId> descendants(const Tree& tree, VertexId v) {
  auto order = tree.preorder(v);
  order.erase(order.begin());
  return order;
}

namespace {

// Appends a copy of source[from] below `parent` of `dest`. Children are pushed
// in reverse so siblings keep their order.
void graft(Tree& dest, VertexId parent, const Tree& source, VertexId from) {
  std::vector<std::pair<VertexId, VertexId>> stack{{from, parent}};
  while (!stack.empty()) {
    auto [src, dst_parent] = stack.back();
    stack.pop_back();
    VertexId copy = dest.add_child(dst_parent, source.label(src));
    auto ch = source.children(src);
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.emplace_back(*it, copy);
  }
}

}  // namespace

Tree subtree(const Tree& tree, VertexId v) {
  Tree out(tree.label(v));
  for (VertexId c : tree.children(v)) graft(out, out.root(), tree, c);
  return out;
}

Tree replace_subtree(const Tree& tree, VertexId v, const Tree& replacement) {
  if (!tree.contains(v)) throw std::out_of_range("vertex " + std::to_string(v) + " not in tree");
  if (v == tree.root()) return replacement;
  Tree out(tree.label(tree.root()));
  // (source vertex, copy of its parent)
  std::vector<std::pair<VertexId, VertexId>> stack;
  auto ch = tree.children(tree.root());
  for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.emplace_back(*it, out.root());
  while (!stack.empty()) {
    auto [src, dst_parent] = stack.back();
    stack.pop_back();
    if (src == v) {
      VertexId copy = out.add_child(dst_parent, replacement.label(replacement.root()));
      for (VertexId c : replacement.children(replacement.root())) graft(out, copy, replacement, c);
      continue;
    }
    VertexId copy = out.add_child(dst_parent, tree.label(src));
    auto sch = tree.children(src);
    for (auto it = sch.rbegin(); it != sch.rend(); ++it) stack.emplace_back(*it, copy);
  }
  return out;
}

Tree supertree(std::span<const Tree> forest) {
  Tree out;
  for (const Tree& member : forest) {
    VertexId r = out.add_child(out.root(), member.label(member.root()));
    for (VertexId c : member.children(member.root())) graft(out, r, member, c);
  }
  return out;
}

Tree strip_labels(const Tree& tree) {
  Tree out;
  std::vector<std::pair<VertexId, VertexId>> stack;
  auto ch = tree.children(tree.root());
  for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.emplace_back(*it, out.root());
  while (!stack.empty()) {
    auto [src, dst_parent] = stack.back();
    stack.pop_back();
    VertexId copy = out.add_child(dst_parent);
    auto sch = tree.children(src);
    for (auto it = sch.rbegin(); it != sch.rend(); ++it) stack.emplace_back(*it, copy);
  }
  return out;
}

namespace {

std::string encode(const Tree& tree, VertexId v, const TreeMode& mode,
                   std::vector<std::string>& codes) {
  std::string code;
  if (mode.labeled && tree.label(v) != kNoLabel) code += std::to_string(tree.label(v));
  code += '(';
  auto ch = tree.children(v);
  if (mode.ordered()) {
    for (VertexId c : ch) code += codes[c];
  } else {
    std::vector<const std::string*> parts;
    parts.reserve(ch.size());
    for (VertexId c : ch) parts.push_back(&codes[c]);
    std::sort(parts.begin(), parts.end(), [](auto* a, auto* b) { return *a < *b; });
    for (auto* p : parts) code += *p;
  }
  code += ')';
  return code;
}

}  // namespace

std::vector<Signature> subtree_signatures(const Tree& tree, const TreeMode& mode) {
  std::vector<std::string> codes(tree.size());
  for (VertexId v : tree.postorder()) codes[v] = encode(tree, v, mode, codes);
  std::vector<Signature> out;
  out.reserve(codes.size());
  for (auto& c : codes) out.emplace_back(std::move(c));
  return out;
}

Signature canonical_signature(const Tree& tree, VertexId v, const TreeMode& mode) {
  std::vector<std::string> codes(tree.size());
  for (VertexId u : tree.postorder(v)) codes[u] = encode(tree, u, mode, codes);
  return Signature(std::move(codes[v]));
}

Signature canonical_signature(const Tree& tree, const TreeMode& mode) {
  return canonical_signature(tree, tree.root(), mode);
}

std::size_t count_occurrences(const Tree& pattern, const Tree& target, const TreeMode& mode) {
  const Signature wanted = canonical_signature(pattern, mode);
  auto sigs = subtree_signatures(target, mode);
  return static_cast<std::size_t>(std::count(sigs.begin(), sigs.end(), wanted));
}

namespace {

class BracketParser {
 public:
  BracketParser(std::string_view text, const TreeMode& mode, Alphabet& alphabet)
      : text_(text), mode_(mode), alphabet_(alphabet) {}

  Tree parse() {
    skip_space();
    if (pos_ >= text_.size()) fail("empty input; a tree needs at least a root");
    Tree tree(read_label());
    expect_open();
    // Stack of open vertices awaiting their ')'.
    std::vector<VertexId> open{tree.root()};
    while (!open.empty()) {
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated tree: missing ')'");
      if (text_[pos_] == ')') {
        ++pos_;
        open.pop_back();
        continue;
      }
      Symbol label = read_label();
      expect_open();
      open.push_back(tree.add_child(open.back(), label));
    }
    skip_space();
    if (pos_ < text_.size()) fail("trailing characters after tree");
    return tree;
  }

 private:
  static bool is_label_char(char c) {
    return c != '(' && c != ')' && !std::isspace(static_cast<unsigned char>(c));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Symbol read_label() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_label_char(text_[pos_])) ++pos_;
    if (pos_ == start || !mode_.labeled) return kNoLabel;
    std::string_view name = text_.substr(start, pos_ - start);
    try {
      return alphabet_.intern(name);
    } catch (const std::invalid_argument& e) {
      pos_ = start;
      fail(e.what());
    }
  }

  void expect_open() {
    if (pos_ >= text_.size() || text_[pos_] != '(') fail("expected '('");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(what, line, column);
  }

  std::string_view text_;
  TreeMode mode_;
  Alphabet& alphabet_;
  std::size_t pos_ = 0;
};

}  // namespace

Tree parse_tree(std::string_view text, const TreeMode& mode, Alphabet& alphabet) {
  return BracketParser(text, mode, alphabet).parse();
}

Tree parse_tree(std::string_view text, const TreeMode& mode) {
  Alphabet scratch;
  return parse_tree(text, mode, scratch);
}

std::string serialize_tree(const Tree& tree, const Alphabet* alphabet) {
  std::string out;
  // Second member: true once the children have been emitted.
  std::vector<std::pair<VertexId, bool>> stack{{tree.root(), false}};
  while (!stack.empty()) {
    auto& [v, done] = stack.back();
    if (done) {
      out += ')';
      stack.pop_back();
      continue;
    }
    done = true;
    VertexId current = v;
    if (tree.label(current) != kNoLabel) {
      if (alphabet == nullptr) throw std::invalid_argument("labeled tree needs an alphabet to serialize");
      out += alphabet->name(tree.label(current));
    }
    out += '(';
    auto ch = tree.children(current);
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.emplace_back(*it, false);
  }
  return out;
}

}  // namespace stk
