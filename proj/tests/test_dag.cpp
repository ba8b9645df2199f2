#include <doctest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "subtree_kernel/dag.hpp"

using namespace stk;

namespace {

const TreeMode kUnordered{Order::unordered, false};
const TreeMode kOrdered{Order::ordered, false};
const TreeMode kModes[4] = {kUnordered, kOrdered, {Order::unordered, true}, {Order::ordered, true}};

std::size_t edges_with_multiplicity(const Dag& d, std::uint32_t m) {
  std::size_t n = 0;
  for (const DagVertex& v : d.vertices())
    for (const DagEdge& e : v.children) n += e.multiplicity == m;
  return n;
}

Tree complete_binary(std::uint32_t h) {
  Tree t;
  std::vector<VertexId> level{t.root()};
  for (std::uint32_t k = 0; k < h; ++k) {
    std::vector<VertexId> next;
    for (VertexId v : level) {
      next.push_back(t.add_child(v));
      next.push_back(t.add_child(v));
    }
    level = next;
  }
  return t;
}

// No two vertices share (label, children), checked by a direct scan.
bool minimal(const Dag& d) {
  std::set<std::pair<Symbol, std::vector<std::pair<VertexId, std::uint32_t>>>> seen;
  for (const DagVertex& v : d.vertices()) {
    std::vector<std::pair<VertexId, std::uint32_t>> ch;
    for (const DagEdge& e : v.children) ch.emplace_back(e.child, e.multiplicity);
    if (!seen.emplace(v.label, ch).second) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("dag") {

TEST_CASE("fifteen-vertex fixture") {
  Tree t = parse_tree(fixture::kFifteen, kOrdered);
  REQUIRE(t.size() == 15);
  Dag u = reduce(t, kUnordered);
  CHECK(u.size() == 5);
  CHECK(edges_with_multiplicity(u, 2) == 1);
  CHECK(u.height() == 4);
  Dag o = reduce(t, kOrdered);
  CHECK(o.size() == 6);
  CHECK(edges_with_multiplicity(o, 2) == 0);
  CHECK(oracle::isomorphic(expand(u), t, kUnordered));
  CHECK(oracle::isomorphic(expand(o), t, kOrdered));
  CHECK(expand(u).size() == 15);
}

TEST_CASE("complete binary tree reduces to a chain") {
  Dag d = reduce(complete_binary(3), kUnordered);
  CHECK(d.size() == 4);
  for (const DagVertex& v : d.vertices()) {
    if (v.height == 0) continue;
    REQUIRE(v.children.size() == 1);
    CHECK(v.children[0].multiplicity == 2);
  }
}

TEST_CASE("single vertex") {
  Dag d = reduce(Tree{}, kUnordered);
  CHECK(d.size() == 1);
  CHECK(expand(d).size() == 1);
}

TEST_CASE("expand rejects a forest") {
  std::vector<Dag> f{reduce(Tree{}, kUnordered), reduce(Tree{}, kUnordered)};
  Dag s = build_superdag(f);
  Dag bare(kUnordered);
  bare.add_vertex(kNoLabel, std::vector<DagEdge>{});
  bare.add_vertex(kNoLabel, std::vector<DagEdge>{});
  CHECK_NOTHROW(expand(s));
  CHECK_THROWS_AS(expand(bare), std::invalid_argument);
}

TEST_CASE("expand after reduce is the identity on random trees") {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 400; ++n) {
    const TreeMode& mode = kModes[n % 4];
    Tree t = n % 2 ? oracle::random_tree(rng, 100, mode.labeled ? 3 : 0)
                   : oracle::random_shared_tree(rng, 100, mode.labeled ? 3 : 0);
    Dag d = reduce(t, mode);
    REQUIRE_FALSE(validate(d).has_value());
    CHECK(minimal(d));
    CHECK(is_reduced(d));
    CHECK(canonical_signature(expand(d), mode) == canonical_signature(t, mode));
    if (t.size() <= 20) {
      CHECK(oracle::isomorphic(expand(d), t, mode));
      CHECK(d.size() == oracle::distinct_subtrees(t, mode));
    }
  }
}

TEST_CASE("one leaf vertex per leaf label") {
  std::mt19937_64 rng(2);
  for (int n = 0; n < 100; ++n) {
    Tree t = oracle::random_tree(rng, 40, 3);
    Dag d = reduce(t, {Order::unordered, true});
    std::set<Symbol> labels;
    for (VertexId v : leaves(t)) labels.insert(t.label(v));
    std::size_t h0 = 0;
    for (const DagVertex& v : d.vertices()) h0 += v.height == 0;
    CHECK(h0 == labels.size());
  }
}

TEST_CASE("superdag construction") {
  std::vector<Dag> one{reduce(parse_tree(fixture::kFifteen, kUnordered), kUnordered)};
  Dag s1 = build_superdag(one);
  CHECK(s1.size() == 6);
  CHECK(s1.has_artificial_root());
  CHECK(s1.height() == 5);

  std::vector<Dag> leaves{reduce(Tree{}, kUnordered), reduce(Tree{}, kUnordered)};
  CHECK(build_superdag(leaves).size() == 3);
  CHECK(recompress(build_superdag(leaves)).size() == 2);
  CHECK_THROWS_AS(build_superdag(std::vector<Dag>{}), std::invalid_argument);
}

TEST_CASE("two-tree forest recompression") {
  Tree t1 = parse_tree(fixture::kFifteen, kOrdered);
  Tree t2 = parse_tree(fixture::kEleven, kOrdered);
  REQUIRE(t2.size() == 11);
  for (const TreeMode& mode : {kUnordered, kOrdered}) {
    std::vector<Dag> f{reduce(t1, mode), reduce(t2, mode)};
    CHECK(f[1].size() == (mode.ordered() ? 6u : 5u));
    Dag s = build_superdag(f);
    CHECK(s.size() == f[0].size() + f[1].size() + 1);
    RecompressStats stats;
    Dag r = recompress(s, &stats);
    // Merges at heights 0, 1 and 2, nothing at height 3.
    REQUIRE(stats.stop_height.has_value());
    CHECK(*stats.stop_height == 3);
    REQUIRE(stats.merged_per_height.size() >= 3);
    CHECK(stats.merged_per_height[0] == 1);
    CHECK(stats.merged_per_height[1] == 1);
    CHECK(stats.merged_per_height[2] == (mode.ordered() ? 2u : 1u));
    std::vector<Tree> forest{t1, t2};
    Dag direct = reduce(oracle::join(forest), mode);
    CHECK(r.size() == direct.size());
    CHECK(is_reduced(r));
    CHECK(oracle::isomorphic(expand(r), oracle::join(forest), mode));
  }
}

TEST_CASE("identical members share everything") {
  Dag d = reduce(parse_tree(fixture::kFifteen, kUnordered), kUnordered);
  std::vector<Dag> f{d, d};
  Dag r = recompress(build_superdag(f));
  CHECK(r.size() == d.size() + 1);
  auto roots = r.member_roots();
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == roots[1]);
}

TEST_CASE("recompress equals reduction of the supertree on random forests") {
  std::mt19937_64 rng(23);
  for (int n = 0; n < 300; ++n) {
    const TreeMode& mode = kModes[n % 4];
    auto forest = oracle::random_forest(rng, 8, 20, mode.labeled ? 2 : 0);
    std::vector<Dag> dags;
    for (const Tree& t : forest) dags.push_back(reduce(t, mode));
    Dag r = recompress(build_superdag(dags));
    Tree joined = oracle::join(forest);
    Dag direct = reduce(joined, mode);
    REQUIRE_FALSE(validate(r).has_value());
    CHECK(minimal(r));
    CHECK(r.size() == direct.size());
    CHECK(r.member_count() == forest.size());
    REQUIRE(oracle::isomorphic(expand(r), joined, mode));
    CHECK(write_dag_text(r) == write_dag_text(reduce_forest(forest, mode)));
  }
}

TEST_CASE("add_to_forest") {
  std::mt19937_64 rng(29);
  for (int n = 0; n < 100; ++n) {
    const TreeMode& mode = kModes[n % 2];
    auto forest = oracle::random_forest(rng, 5, 20);
    Dag base = reduce_forest(forest, mode);
    Tree extra = n % 3 == 0 ? forest.front() : oracle::random_shared_tree(rng, 20);
    Dag grown = add_to_forest(base, reduce(extra, mode));
    forest.push_back(extra);
    Dag full = reduce_forest(forest, mode);
    CHECK(grown.size() == full.size());
    CHECK(grown.member_count() == forest.size());
    CHECK(oracle::isomorphic(expand(grown), oracle::join(forest), mode));
    if (n % 3 == 0) CHECK(grown.size() == base.size());
  }
  Dag empty(kUnordered);
  CHECK_THROWS_AS(add_to_forest(empty, reduce(Tree{}, kUnordered)), std::invalid_argument);
  Dag f = reduce_forest(std::vector<Tree>{Tree{}}, kUnordered);
  CHECK_THROWS_AS(add_to_forest(f, reduce(Tree{}, kOrdered)), std::invalid_argument);
}

TEST_CASE("reducing a reduced forest changes nothing") {
  std::mt19937_64 rng(31);
  for (int n = 0; n < 50; ++n) {
    const TreeMode& mode = kModes[n % 4];
    auto forest = oracle::random_forest(rng, 6, 20, mode.labeled ? 2 : 0);
    Dag r = reduce_forest(forest, mode);
    RecompressStats stats;
    Dag again = recompress(r, &stats);
    CHECK(again.size() == r.size());
    CHECK(stats.stop_height == std::optional<std::uint32_t>(0));
  }
}

TEST_CASE("signatures on the DAG match tree signatures") {
  std::mt19937_64 rng(37);
  for (int n = 0; n < 100; ++n) {
    const TreeMode& mode = kModes[n % 4];
    Tree t = oracle::random_shared_tree(rng, 40, mode.labeled ? 2 : 0);
    Dag d = reduce(t, mode);
    auto sig = dag_signatures(d);
    for (VertexId v = 0; v < d.size(); ++v) CHECK(sig[v] == canonical_signature(expand(d, v), mode));
  }
}

TEST_CASE("DAG text round trip") {
  Alphabet a;
  Tree t = parse_tree("a(b()c(b())b())", {Order::unordered, true}, a);
  Dag d = reduce(t, {Order::unordered, true});
  std::string text = write_dag_text(d, &a);
  CHECK(text.rfind("# dag unordered labeled", 0) == 0);
  Alphabet b;
  Dag back = read_dag_text(text, b);
  CHECK(write_dag_text(back, &b) == text);
  CHECK(oracle::isomorphic(expand(back), parse_tree("a(b()c(b())b())", {Order::unordered, true}, b),
                           {Order::unordered, true}));

  Dag forest = reduce_forest(std::vector<Tree>{parse_tree(fixture::kFifteen, kOrdered), Tree{}}, kOrdered);
  Alphabet c;
  // Ids are renumbered on reading, after which the text is a fixed point.
  Dag read_once = read_dag_text(write_dag_text(forest), c);
  CHECK(read_once.size() == forest.size());
  CHECK(oracle::isomorphic(expand(read_once), expand(forest), kOrdered));
  CHECK(write_dag_text(read_dag_text(write_dag_text(read_once), c)) == write_dag_text(read_once));
  CHECK_THROWS(read_dag_text("0 0 -> (5,1)\n", c));
}

}  // TEST_SUITE
