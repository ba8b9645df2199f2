#include "subtree_kernel/markup.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <random>
#include <stdexcept>

#include "subtree_kernel/errors.hpp"

namespace stk {

namespace {

constexpr std::array<std::string_view, 14> kVoid{"br",   "hr",    "img",   "input",  "meta", "link",  "area",
                                                 "base", "col",   "embed", "param",  "source", "track", "wbr"};
constexpr std::array<std::string_view, 2> kRawText{"script", "style"};

bool is_void(std::string_view tag) { return std::find(kVoid.begin(), kVoid.end(), tag) != kVoid.end(); }
bool is_raw_text(std::string_view tag) { return std::find(kRawText.begin(), kRawText.end(), tag) != kRawText.end(); }

class MarkupParser {
 public:
  explicit MarkupParser(std::string_view text) : text_(text) {}

  MarkupNode run() {
    while (pos_ < text_.size()) {
      if (text_[pos_] != '<') {
        ++pos_;
        continue;
      }
      if (starts("<!--")) {
        skip_past("-->", "unterminated comment");
      } else if (starts("<!") || starts("<?")) {
        skip_past(">", "unterminated declaration");
      } else if (starts("</")) {
        close_tag();
      } else if (pos_ + 1 < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_ + 1]))) {
        open_tag();
      } else {
        ++pos_;  // a lone '<' in text
      }
    }
    if (!open_.empty()) {
      const Open& o = open_.back();
      throw ParseError("element <" + o.node.tag + "> is never closed", o.line, o.column);
    }
    if (roots_.empty()) throw ParseError("document has no element", 0, 0);
    return std::move(roots_.front());
  }

 private:
  struct Open {
    MarkupNode node;
    std::size_t line, column;
  };

  bool starts(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  std::pair<std::size_t, std::size_t> location(std::size_t at) const {
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k < at && k < text_.size(); ++k) {
      if (text_[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    return {line, column};
  }

  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    auto [line, column] = location(at);
    throw ParseError(what, line, column);
  }

  void skip_past(std::string_view end, const char* what) {
    std::size_t found = text_.find(end, pos_);
    if (found == std::string_view::npos) fail(what, pos_);
    pos_ = found + end.size();
  }

  std::string read_name() {
    std::string name;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':' || c == '.') {
        name += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        ++pos_;
      } else {
        break;
      }
    }
    return name;
  }

  // Skips attributes up to '>', honouring quotes. Returns true for "/>".
  bool skip_attributes(std::size_t tag_start) {
    char quote = 0;
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '>') {
        return pos_ >= 2 && text_[pos_ - 2] == '/';
      }
    }
    fail("unterminated tag", tag_start);
  }

  void attach(MarkupNode node, std::size_t at) {
    if (!open_.empty()) {
      open_.back().node.children.push_back(std::move(node));
      return;
    }
    if (!roots_.empty()) fail("document has more than one root element", at);
    roots_.push_back(std::move(node));
  }

  void open_tag() {
    std::size_t start = pos_;
    ++pos_;
    std::string name = read_name();
    bool self_closing = skip_attributes(start);
    if (self_closing || is_void(name)) {
      attach(MarkupNode{name, {}}, start);
      return;
    }
    if (is_raw_text(name)) {
      // Content is not markup; skip to the matching end tag.
      std::string end = "</" + name;
      std::size_t p = pos_;
      while (true) {
        p = text_.find("</", p);
        if (p == std::string_view::npos) fail("element <" + name + "> is never closed", start);
        std::string candidate;
        for (std::size_t k = p; k < p + end.size() && k < text_.size(); ++k)
          candidate += static_cast<char>(std::tolower(static_cast<unsigned char>(text_[k])));
        if (candidate == end) break;
        p += 2;
      }
      pos_ = p;
      skip_past(">", "unterminated closing tag");
      attach(MarkupNode{name, {}}, start);
      return;
    }
    auto [line, column] = location(start);
    open_.push_back(Open{MarkupNode{name, {}}, line, column});
  }

  void close_tag() {
    std::size_t start = pos_;
    pos_ += 2;
    std::string name = read_name();
    skip_past(">", "unterminated closing tag");
    if (is_void(name)) return;  // "</br>" and friends carry nothing
    auto it = std::find_if(open_.rbegin(), open_.rend(), [&](const Open& o) { return o.node.tag == name; });
    if (it == open_.rend()) fail("closing tag </" + name + "> matches no open element", start);
    std::size_t depth = static_cast<std::size_t>(it - open_.rbegin()) + 1;
    for (std::size_t k = 0; k < depth; ++k) {
      MarkupNode done = std::move(open_.back().node);
      open_.pop_back();
      attach(std::move(done), start);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Open> open_;
  std::vector<MarkupNode> roots_;
};

void write_node(const MarkupNode& n, std::string& out) {
  out += '<' + n.tag + '>';
  if (is_void(n.tag)) return;
  for (const auto& c : n.children) write_node(c, out);
  out += "</" + n.tag + '>';
}

}  // namespace

MarkupNode parse_markup(std::string_view document) { return MarkupParser(document).run(); }

Tree markup_to_tree(const MarkupNode& root, bool labeled, Alphabet& alphabet) {
  auto sym = [&](const std::string& tag) { return labeled ? alphabet.intern(tag) : kNoLabel; };
  Tree tree(sym(root.tag));
  std::vector<std::pair<const MarkupNode*, VertexId>> stack{{&root, tree.root()}};
  while (!stack.empty()) {
    auto [node, v] = stack.back();
    stack.pop_back();
    std::vector<std::pair<const MarkupNode*, VertexId>> pending;
    for (const auto& c : node->children) pending.emplace_back(&c, tree.add_child(v, sym(c.tag)));
    stack.insert(stack.end(), pending.rbegin(), pending.rend());
  }
  return tree;
}

Tree markup_to_tree(std::string_view document, bool labeled, Alphabet& alphabet) {
  return markup_to_tree(parse_markup(document), labeled, alphabet);
}

std::string write_markup(const MarkupNode& root) {
  std::string out;
  write_node(root, out);
  return out;
}

namespace {

// Internal layout tags are dealt to the templates so that two templates
// share no internal subtree; leaves and content are common to all classes.
const std::vector<std::string> kLayoutTags{"div",  "section", "table", "tr",    "nav",  "header",
                                           "form", "article", "aside", "main", "footer", "dl"};
const std::vector<std::string> kLayoutLeaves{"img", "hr", "input", "td", "li", "span"};
const std::vector<std::string> kContentTags{"p", "b", "i", "a", "em", "ol", "li"};
const std::vector<std::string> kContentLeaves{"br", "img", "a", "b", "i", "em"};

template <class T>
const T& pick(const std::vector<T>& xs, std::mt19937_64& rng) {
  return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

std::size_t node_height(const MarkupNode& n) {
  std::size_t h = 0;
  for (const auto& c : n.children) h = std::max(h, node_height(c) + 1);
  return h;
}

// Random layout tree of exact height h.
MarkupNode random_layout(std::uint32_t h, const std::vector<std::string>& tags, std::mt19937_64& rng) {
  if (h == 0) return MarkupNode{pick(kLayoutLeaves, rng), {}};
  MarkupNode n{pick(tags, rng), {}};
  std::size_t fan = std::uniform_int_distribution<std::size_t>(2, 4)(rng);
  std::size_t tall = std::uniform_int_distribution<std::size_t>(0, fan - 1)(rng);
  for (std::size_t c = 0; c < fan; ++c) {
    std::uint32_t ch = c == tall ? h - 1 : std::uniform_int_distribution<std::uint32_t>(0, h - 1)(rng);
    n.children.push_back(random_layout(ch, tags, rng));
  }
  return n;
}

// Shared content of exact height h, bushy near the bottom.
MarkupNode random_content(std::uint32_t h, std::mt19937_64& rng) {
  if (h == 0) return MarkupNode{pick(kContentLeaves, rng), {}};
  MarkupNode n{pick(kContentTags, rng), {}};
  std::size_t fan = std::uniform_int_distribution<std::size_t>(2, 4)(rng);
  std::size_t tall = std::uniform_int_distribution<std::size_t>(0, fan - 1)(rng);
  for (std::size_t c = 0; c < fan; ++c) {
    std::uint32_t ch = c == tall ? h - 1 : std::uniform_int_distribution<std::uint32_t>(0, std::min<std::uint32_t>(h - 1, 1))(rng);
    n.children.push_back(random_content(ch, rng));
  }
  return n;
}

std::size_t count_leaves(const MarkupNode& n) {
  if (n.children.empty()) return 1;
  std::size_t s = 0;
  for (const auto& c : n.children) s += count_leaves(c);
  return s;
}

// Pointers to nodes of the given height, in preorder.
void collect_at_height(MarkupNode& n, std::size_t h, std::vector<MarkupNode*>& out) {
  if (node_height(n) == h) out.push_back(&n);
  for (auto& c : n.children) collect_at_height(c, h, out);
}

// Markup text with a little noise the parser has to tolerate.
void render(const MarkupNode& n, std::mt19937_64& rng, std::string& out) {
  std::bernoulli_distribution coin(0.3);
  out += '<' + n.tag;
  if (coin(rng)) out += " class=\"c" + std::to_string(rng() % 7) + "\"";
  if (is_void(n.tag)) {
    out += coin(rng) ? "/>" : ">";
    return;
  }
  if (n.children.empty() && coin(rng)) {
    out += "/>";
    return;
  }
  out += '>';
  if (coin(rng)) out += "text ";
  for (const auto& c : n.children) render(c, rng, out);
  out += "</" + n.tag + ">\n";
}

}  // namespace

Corpus generate_template_corpus(const CorpusOptions& options) {
  if (options.templates < 2) throw std::invalid_argument("a corpus needs at least two templates");
  if (options.per_class == 0) throw std::invalid_argument("per_class must be positive");
  if (!(options.edit_rate >= 0.0 && options.edit_rate <= 1.0)) throw std::invalid_argument("edit_rate must lie in [0, 1]");
  if (options.height < 3) throw std::invalid_argument("template height must be at least 3");
  std::mt19937_64 rng(options.seed);

  // Templates are kept within 10% of the first one's leaf count: the
  // mean-similarity rule is not normalized and would otherwise favour the
  // larger template whatever the weights.
  std::vector<MarkupNode> templates;
  for (std::size_t k = 0; k < options.templates; ++k) {
    std::vector<std::string> tags;
    for (std::size_t t = k % kLayoutTags.size(); t < kLayoutTags.size(); t += options.templates)
      tags.push_back(kLayoutTags[t]);
    if (tags.empty()) tags.push_back(kLayoutTags[k % kLayoutTags.size()]);
    MarkupNode body;
    for (int attempt = 0;; ++attempt) {
      body = random_layout(options.height - 2, tags, rng);
      if (k == 0 || attempt >= 1000) break;
      double ref = static_cast<double>(count_leaves(templates.front()));
      if (std::abs(static_cast<double>(count_leaves(body)) - ref) <= 0.1 * ref) break;
    }
    templates.push_back(MarkupNode{"html", {MarkupNode{"body", {std::move(body)}}}});
  }
  // The html/body frame adds two levels above the random layout.
  const std::uint32_t H = options.height;

  Corpus corpus;
  corpus.data.mode = TreeMode{Order::ordered, true};
  for (std::size_t k = 0; k < options.templates; ++k) corpus.data.class_id("t" + std::to_string(k));
  std::binomial_distribution<std::uint32_t> law(H, options.edit_rate);
  for (std::size_t k = 0; k < options.templates; ++k) {
    for (std::size_t n = 0; n < options.per_class; ++n) {
      MarkupNode doc = templates[k];
      std::uint32_t h = law(rng);
      if (h > 0) {
        std::vector<MarkupNode*> spots;
        collect_at_height(doc, h, spots);
        MarkupNode* target = spots[std::uniform_int_distribution<std::size_t>(0, spots.size() - 1)(rng)];
        *target = random_content(h, rng);
      }
      std::string text = "<!DOCTYPE html>\n";
      render(doc, rng, text);
      Tree tree = markup_to_tree(text, true, corpus.data.alphabet);
      corpus.data.add(std::move(tree), static_cast<ClassId>(k));
      corpus.documents.push_back(std::move(text));
    }
  }
  return corpus;
}

}  // namespace stk
