#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "subtree_kernel/errors.hpp"
#include "subtree_kernel/tree.hpp"

using namespace stk;

namespace {

const TreeMode kModes[4] = {
    {Order::unordered, false}, {Order::ordered, false}, {Order::unordered, true}, {Order::ordered, true}};

Tree chain(std::size_t n) {
  Tree t;
  VertexId v = t.root();
  for (std::size_t k = 1; k < n; ++k) v = t.add_child(v);
  return t;
}

}  // namespace

TEST_SUITE("tree") {

TEST_CASE("height") {
  CHECK(height(Tree{}) == 0);
  CHECK(height(chain(6)) == 5);
  Tree t0 = parse_tree(fixture::kPairT0, {});
  CHECK(height(t0) == 3);
  CHECK_THROWS_AS(height(t0, 99), std::out_of_range);
}

TEST_CASE("outdegree and leaves") {
  CHECK(outdegree(Tree{}) == 0);
  CHECK(outdegree(chain(4)) == 1);
  Tree t0 = parse_tree(fixture::kPairT0, {});
  Tree t1 = parse_tree(fixture::kPairT1, {});
  CHECK(outdegree(t1) == 4);
  CHECK(leaves(t0).size() == 6);
  CHECK(leaves(t1).size() == 6);
  CHECK(leaves(Tree{}) == std::vector<VertexId>{0});
}

TEST_CASE("subtree") {
  Tree t0 = parse_tree(fixture::kPairT0, {});
  // The vertex with three children is a 4-vertex star.
  VertexId star = 0;
  for (VertexId v = 0; v < t0.size(); ++v)
    if (t0.children(v).size() == 3 && v != 1) star = v;
  Tree s = subtree(t0, star);
  CHECK(s.size() == 4);
  CHECK(height(s) == 1);
  CHECK(canonical_signature(subtree(t0, 0), {}) == canonical_signature(t0, {}));
  CHECK(subtree(t0, leaves(t0).front()).size() == 1);
}

TEST_CASE("signature basics") {
  CHECK(canonical_signature(Tree{}, {}) == canonical_signature(Tree{}, {}));
  Tree t = parse_tree("((())()(()()))", {Order::ordered, false});
  Tree m = oracle::mirrored(t);
  CHECK(canonical_signature(t, {Order::unordered, false}) == canonical_signature(m, {Order::unordered, false}));
  CHECK(canonical_signature(t, {Order::ordered, false}) != canonical_signature(m, {Order::ordered, false}));
}

TEST_CASE("signature agrees with the brute-force test on all small shapes") {
  auto shapes = oracle::shapes_up_to(6);
  for (const TreeMode& mode : {kModes[0], kModes[1]}) {
    std::vector<Signature> sig;
    for (const Tree& t : shapes) sig.push_back(canonical_signature(t, mode));
    for (std::size_t a = 0; a < shapes.size(); ++a)
      for (std::size_t b = a; b < shapes.size(); ++b)
        REQUIRE((sig[a] == sig[b]) == oracle::isomorphic(shapes[a], shapes[b], mode));
  }
}

TEST_CASE("signature agrees with the brute-force test on random pairs") {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 1000; ++n) {
    const TreeMode& mode = kModes[n % 4];
    int labels = mode.labeled ? 2 : 0;
    Tree a = oracle::random_tree(rng, 30, labels);
    // Half of the pairs are permuted copies, which must stay equal unordered.
    Tree b = n % 2 ? oracle::shuffled(a, rng) : oracle::random_tree(rng, 30, labels);
    if (n % 8 == 1) b = a;
    REQUIRE((canonical_signature(a, mode) == canonical_signature(b, mode)) == oracle::isomorphic(a, b, mode));
  }
}

TEST_CASE("count_occurrences") {
  Tree t0 = parse_tree(fixture::kPairT0, {});
  CHECK(count_occurrences(Tree{}, t0, {}) == 6);
  CHECK(count_occurrences(t0, t0, {}) == 1);
  CHECK(count_occurrences(chain(2), chain(3), {}) == 1);
  std::mt19937_64 rng(3);
  for (int n = 0; n < 200; ++n) {
    Tree t = oracle::random_shared_tree(rng, 20);
    CHECK(count_occurrences(Tree{}, t, {}) == leaf_count(t));
    Tree p = subtree(t, static_cast<VertexId>(rng() % t.size()));
    for (const TreeMode& mode : {kModes[0], kModes[1]})
      CHECK(count_occurrences(p, t, mode) == oracle::occurrences(p, t, mode));
  }
}

TEST_CASE("height invariants") {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 200; ++n) {
    Tree t = oracle::random_tree(rng, 40);
    auto hs = heights(t);
    for (VertexId v = 0; v < t.size(); ++v) {
      CHECK(hs[v] <= height(t));
      CHECK(hs[v] == oracle::height_below(t, v));
    }
    CHECK((height(t) == 0) == (t.size() == 1));
  }
}

TEST_CASE("bracket format") {
  Tree leaf = parse_tree("()", {});
  CHECK(leaf.size() == 1);
  Tree cherry = parse_tree("(()())", {});
  CHECK(cherry.size() == 3);
  CHECK(cherry.children(0).size() == 2);
  CHECK(serialize_tree(cherry) == "(()())");

  Alphabet a;
  Tree lab = parse_tree(" a( b() c(d()) ) ", {Order::ordered, true}, a);
  CHECK(serialize_tree(lab, &a) == "a(b()c(d()))");
  // Labels are dropped in unlabeled mode.
  Tree plain = parse_tree("a(b()c())", {});
  CHECK_FALSE(plain.has_labels());

  CHECK_THROWS_AS(parse_tree("(()", {}), ParseError);
  CHECK_THROWS_AS(parse_tree("())", {}), ParseError);
  CHECK_THROWS_AS(parse_tree("", {}), ParseError);
  CHECK_THROWS_AS(parse_tree("()()", {}), ParseError);
  try {
    parse_tree("(()\n x", {});
    FAIL("no exception");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 1);
    CHECK(e.column() >= 1);
  }
}

TEST_CASE("parse after serialize is the identity") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 400; ++n) {
    const TreeMode& mode = kModes[n % 4];
    Alphabet a;
    for (const char* s : {"x", "y", "z"}) a.intern(s);
    Tree t = oracle::random_tree(rng, 40, mode.labeled ? 3 : 0);
    std::string text = serialize_tree(t, mode.labeled ? &a : nullptr);
    Tree back = parse_tree(text, mode, a);
    REQUIRE(oracle::isomorphic(t, back, {Order::ordered, mode.labeled}));
    CHECK(serialize_tree(back, mode.labeled ? &a : nullptr) == text);
  }
}

TEST_CASE("editing helpers") {
  Tree t = parse_tree("((())())", {Order::ordered, false});
  Tree r = replace_subtree(t, 1, parse_tree("(()()())", {}));
  CHECK(r.size() == 6);
  CHECK(leaf_count(r) == 4);
  Tree whole = replace_subtree(t, 0, Tree{});
  CHECK(whole.size() == 1);
  std::vector<Tree> f{t, Tree{}};
  Tree s = supertree(f);
  CHECK(s.size() == t.size() + 2);
  CHECK(s.children(0).size() == 2);
  CHECK(ancestors(t, 2) == std::vector<VertexId>{1, 0});
  CHECK(descendants(t, 0).size() == 3);
}

TEST_CASE("alphabet") {
  Alphabet a;
  CHECK(a.intern("p") == 0);
  CHECK(a.intern("q") == 1);
  CHECK(a.intern("p") == 0);
  CHECK(a.name(1) == "q");
  a.freeze();
  CHECK_THROWS(a.intern("r"));
  CHECK(a.find("r") == std::nullopt);
}

}  // TEST_SUITE
