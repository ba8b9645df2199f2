#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "subtree_kernel/annotate.hpp"

using namespace stk;

namespace {

const TreeMode kUnordered{Order::unordered, false};
const TreeMode kModes[4] = {kUnordered, {Order::ordered, false}, {Order::unordered, true}, {Order::ordered, true}};

VertexId leaf_vertex(const Dag& d) {
  for (VertexId v = 0; v < d.size(); ++v)
    if (d.vertex(v).height == 0) return v;
  return 0;
}

}  // namespace

TEST_SUITE("annotate") {

TEST_CASE("origins of root children and the shared leaf") {
  std::vector<Tree> f{parse_tree(fixture::kFifteen, kUnordered), parse_tree(fixture::kEleven, kUnordered),
                      parse_tree("(()())", kUnordered)};
  AnnotatedDag a = annotate(f, kUnordered);
  auto roots = a.dag().member_roots();
  for (MemberId i = 0; i < 3; ++i) {
    auto o = a.origins(roots[i]);
    CHECK(std::find(o.begin(), o.end(), i) != o.end());
    CHECK(a.count(roots[i], i) == 1);
  }
  auto all = a.origins(leaf_vertex(a.dag()));
  CHECK(std::vector<MemberId>(all.begin(), all.end()) == std::vector<MemberId>{0, 1, 2});
}

TEST_CASE("disjoint trees share only the leaf") {
  // A chain of two and a cherry have no common internal subtree.
  std::vector<Tree> f{parse_tree("((()))", kUnordered), parse_tree("(()())", kUnordered)};
  AnnotatedDag a = annotate(f, kUnordered);
  VertexId leaf = leaf_vertex(a.dag());
  for (VertexId v = 0; v < a.dag().size(); ++v) {
    if (v == a.dag().root() || v == leaf) continue;
    CHECK(a.origins(v).size() == 1);
  }
  CHECK(a.matching().matching(0, 1) == std::vector<VertexId>{leaf});
}

TEST_CASE("duplicate members") {
  Tree t = parse_tree(fixture::kFifteen, kUnordered);
  std::vector<Tree> f{t, parse_tree("(())", kUnordered), t};
  AnnotatedDag a = annotate(f, kUnordered);
  auto roots = a.dag().member_roots();
  CHECK(roots[0] == roots[2]);
  auto o = a.origins(roots[0]);
  CHECK(std::vector<MemberId>(o.begin(), o.end()) == std::vector<MemberId>{0, 2});
  CHECK(a.matching().matching(0, 2) == a.matching().matching(0, 0));
}

TEST_CASE("frequencies on a complete binary tree") {
  Tree t;
  std::vector<VertexId> level{t.root()};
  for (int k = 0; k < 3; ++k) {
    std::vector<VertexId> next;
    for (VertexId v : level)
      for (int c = 0; c < 2; ++c) next.push_back(t.add_child(v));
    level = next;
  }
  AnnotatedDag a = annotate(std::vector<Tree>{t}, kUnordered);
  for (VertexId v = 0; v < a.dag().size(); ++v) {
    if (v == a.dag().root()) continue;
    std::uint32_t h = a.dag().vertex(v).height;
    CHECK(a.count(v, 0) == (1u << (3 - h)));
  }
}

TEST_CASE("frequencies match brute-force occurrence counts") {
  std::mt19937_64 rng(41);
  for (int n = 0; n < 120; ++n) {
    const TreeMode& mode = kModes[n % 4];
    auto forest = oracle::random_forest(rng, 6, 20, mode.labeled ? 2 : 0);
    AnnotatedDag a = annotate(forest, mode);
    const Dag& d = a.dag();
    for (VertexId v = 0; v < d.size(); ++v) {
      if (v == d.root()) continue;
      Tree pattern = expand(d, v);
      auto origins = a.origins(v);
      for (MemberId i = 0; i < forest.size(); ++i) {
        std::size_t expected = oracle::occurrences(pattern, forest[i], mode);
        REQUIRE(a.count(v, i) == expected);
        bool in = std::find(origins.begin(), origins.end(), i) != origins.end();
        CHECK(in == (expected > 0));
      }
    }
  }
}

TEST_CASE("frequencies sum to the member size") {
  std::mt19937_64 rng(43);
  for (int n = 0; n < 100; ++n) {
    const TreeMode& mode = kModes[n % 4];
    auto forest = oracle::random_forest(rng, 8, 40, mode.labeled ? 3 : 0);
    AnnotatedDag a = annotate(forest, mode);
    std::vector<std::uint64_t> total(forest.size(), 0);
    for (VertexId v = 0; v < a.dag().size(); ++v) {
      if (v == a.dag().root()) continue;
      for (const FreqEntry& e : a.frequency(v)) total[e.member] += e.count;
    }
    for (MemberId i = 0; i < forest.size(); ++i) CHECK(total[i] == forest[i].size());
  }
}

TEST_CASE("matching map properties") {
  std::mt19937_64 rng(47);
  for (int n = 0; n < 60; ++n) {
    auto forest = oracle::random_forest(rng, 8, 25);
    const TreeMode& mode = kModes[n % 2];
    AnnotatedDag a = annotate(forest, mode);
    AnnotatedDag lazy = annotate(forest, mode, 0);
    CHECK(a.matching().materialized());
    CHECK_FALSE(lazy.matching().materialized());
    std::vector<Dag> own;
    for (const Tree& t : forest) own.push_back(reduce(t, mode));
    for (MemberId i = 0; i < forest.size(); ++i) {
      CHECK(a.matching().match_count(i, i) == own[i].size());
      for (MemberId j = 0; j < forest.size(); ++j) {
        auto m = a.matching().matching(i, j);
        CHECK(m == a.matching().matching(j, i));
        CHECK(m == lazy.matching().matching(i, j));
        CHECK(m.size() <= std::min(own[i].size(), own[j].size()));
        auto mi = a.matching().member_vertices(i);
        auto mj = a.matching().member_vertices(j);
        for (VertexId v : m) {
          CHECK(std::binary_search(mi.begin(), mi.end(), v));
          CHECK(std::binary_search(mj.begin(), mj.end(), v));
          auto o = a.origins(v);
          CHECK(std::find(o.begin(), o.end(), i) != o.end());
          CHECK(std::find(o.begin(), o.end(), j) != o.end());
        }
        std::size_t both = 0;
        for (VertexId v = 0; v < a.dag().size(); ++v) {
          auto o = a.origins(v);
          if (v != a.dag().root() && std::find(o.begin(), o.end(), i) != o.end() &&
              std::find(o.begin(), o.end(), j) != o.end())
            ++both;
        }
        CHECK(both == m.size());
      }
    }
  }
}

TEST_CASE("each annotation runs a single traversal") {
  std::mt19937_64 rng(53);
  auto forest = oracle::random_forest(rng, 8, 30);
  AnnotatedDag a = annotate(forest, kUnordered);
  CHECK(a.counters().origins == 1);
  CHECK(a.counters().frequencies == 1);
  CHECK(a.counters().matching == 1);
}

TEST_CASE("annotation needs an artificial root") {
  Dag single = reduce(parse_tree("(()())", kUnordered), kUnordered);
  CHECK_THROWS_AS(compute_origins(single), std::invalid_argument);
}

}  // TEST_SUITE
