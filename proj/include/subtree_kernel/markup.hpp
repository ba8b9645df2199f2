#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "subtree_kernel/pipeline.hpp"

namespace stk {

struct MarkupNode {
  std::string tag;
  std::vector<MarkupNode> children;
};

// Tolerant element parser: tags are lowercased, attributes and text are
// dropped, comments / doctypes / processing instructions are skipped, void
// elements and "<x/>" need no closing tag, and a closing tag that matches an
// open ancestor closes everything in between. Throws ParseError on a stray
// closing tag, an element left open at the end, several roots or no element.
MarkupNode parse_markup(std::string_view document);

Tree markup_to_tree(const MarkupNode& root, bool labeled, Alphabet& alphabet);
Tree markup_to_tree(std::string_view document, bool labeled, Alphabet& alphabet);

std::string write_markup(const MarkupNode& root);

struct CorpusOptions {
  std::size_t templates = 2;
  std::size_t per_class = 60;
  // Edited height ~ B(height, edit_rate); a height-0 edit changes nothing.
  double edit_rate = 0.3;
  std::uint32_t height = 6;
  std::uint64_t seed = 0;
};

struct Corpus {
  Dataset data;  // ordered, labeled
  std::vector<std::string> documents;
};

// One random template per class. Every instance is its class template with
// one vertex replaced by random content of the same height, drawn from a
// distribution shared by all classes.
Corpus generate_template_corpus(const CorpusOptions& options);

}  // namespace stk
