#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "subtree_kernel/errors.hpp"
#include "subtree_kernel/markup.hpp"
#include "subtree_kernel/pipeline.hpp"

using namespace stk;

namespace {

const TreeMode kUnordered{Order::unordered, false};

std::vector<ClassId> balanced(std::size_t n, std::size_t K) {
  std::vector<ClassId> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = static_cast<ClassId>(i % K);
  return c;
}

Dataset small_corpus(std::uint64_t seed, double rate = 0.3) {
  CorpusOptions o;
  o.per_class = 15;
  o.height = 5;
  o.edit_rate = rate;
  o.seed = seed;
  return generate_template_corpus(o).data;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("manifest round trip") {
  std::string text =
      "# comment\n"
      "(()())\tcherry\ttrain\n"
      "((()))\tchain\tweight\n"
      "\n"
      "(()(()))\t-\tpred\n"
      "()\n";
  Dataset d = read_manifest(text, kUnordered);
  REQUIRE(d.size() == 4);
  CHECK(d.class_count() == 2);
  CHECK(d.classes == std::vector<ClassId>{0, 1, kNoClass, kNoClass});
  CHECK(d.roles == std::vector<Role>{Role::train, Role::weight, Role::pred, Role::none});
  Dataset again = read_manifest(write_manifest(d), kUnordered);
  CHECK(write_manifest(again) == write_manifest(d));
  CHECK(again.classes == d.classes);

  CHECK_THROWS_AS(read_manifest("(()\tx\n", kUnordered), ParseError);
  CHECK_THROWS_AS(read_manifest("(())\tx\tsideways\n", kUnordered), ParseError);
  CHECK_THROWS_AS(read_manifest("@no/such/file.txt\tx\n", kUnordered), ParseError);
  try {
    read_manifest("(())\ta\n(()\ta\n", kUnordered);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("manifest line 2") != std::string::npos);
  }
}

TEST_CASE("manifest files relative to the manifest") {
  auto dir = std::filesystem::temp_directory_path() / "stk_pipeline_manifest";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "t.txt") << fixture::kFifteen;
  Dataset d = read_manifest("@t.txt\ta\n", kUnordered, dir);
  CHECK(d.trees[0].size() == 15);
  std::filesystem::remove_all(dir);
}

TEST_CASE("thirds split") {
  std::vector<ClassId> c = balanced(120, 3);
  Split a = split_thirds(c, 5, Scheme::discriminance);
  Split b = split_thirds(c, 5, Scheme::discriminance);
  CHECK(a.weight == b.weight);
  CHECK(a.train == b.train);
  CHECK(a.pred == b.pred);
  CHECK(a.weight.size() == 40);
  CHECK(a.train.size() == 40);
  CHECK(a.pred.size() == 40);
  // Disjoint, covering, stratified.
  std::set<MemberId> all;
  for (auto* part : {&a.weight, &a.train, &a.pred}) {
    std::vector<std::size_t> per(3, 0);
    for (MemberId i : *part) {
      all.insert(i);
      ++per[c[i]];
    }
    for (std::size_t n : per) CHECK(n >= 13);
  }
  CHECK(all.size() == 120);

  // Exponential scheme merges weight into train.
  Split e = split_thirds(c, 5, Scheme::exponential);
  CHECK(e.weight.empty());
  CHECK(e.train.size() == 80);
  CHECK(e.pred.size() == 40);

  std::set<std::vector<MemberId>> distinct;
  for (std::uint64_t s = 0; s < 50; ++s) distinct.insert(split_thirds(c, s, Scheme::discriminance).pred);
  CHECK(distinct.size() == 50);

  Split tiny = split_thirds(std::vector<ClassId>{0, 0, 0}, 1, Scheme::discriminance);
  CHECK(tiny.weight.size() == 1);
  CHECK(tiny.train.size() == 1);
  CHECK(tiny.pred.size() == 1);

  std::vector<std::string> warnings;
  split_thirds(std::vector<ClassId>{0, 0, 0, 1, 1}, 1, Scheme::discriminance, &warnings);
  CHECK(warnings.size() == 1);

  // Unclassified members are predicted.
  Split u = split_thirds(std::vector<ClassId>{0, 1, 0, 1, 0, 1, kNoClass}, 2, Scheme::discriminance);
  CHECK(std::find(u.pred.begin(), u.pred.end(), 6) != u.pred.end());
}

TEST_CASE("thirds split sizes differ by at most one") {
  std::mt19937_64 rng(107);
  for (int n = 0; n < 200; ++n) {
    std::size_t N = 3 + rng() % 60;
    std::vector<ClassId> c(N);
    for (auto& x : c) x = static_cast<ClassId>(rng() % 4);
    Split s = split_thirds(c, rng(), Scheme::discriminance);
    std::size_t lo = std::min({s.weight.size(), s.train.size(), s.pred.size()});
    std::size_t hi = std::max({s.weight.size(), s.train.size(), s.pred.size()});
    CHECK(hi - lo <= 1);
    CHECK(s.weight.size() + s.train.size() + s.pred.size() == N);
  }
}

TEST_CASE("mean similarity classifier") {
  GramMatrix g;
  g.rows = {10, 11, 12};
  g.cols = {0, 1, 2, 3};
  // Columns: class 0, class 0, class 1, class 1.
  g.values = {5, 3, 4, 4,    // means 4 and 4: tie
              1, 1, 9, 0,    // 1 vs 4.5
              7, 7, 7, 6.9}; // 7 vs 6.95
  std::vector<ClassId> cols{0, 0, 1, 1};
  CHECK(mean_similarity_classify(g, cols) == std::vector<ClassId>{0, 1, 0});
  // Scaling the matrix changes nothing.
  GramMatrix s = g;
  for (double& v : s.values) v *= 3.7;
  CHECK(mean_similarity_classify(s, cols) == mean_similarity_classify(g, cols));
  // An empty class has no mean.
  CHECK_THROWS_AS(mean_similarity_classify(g, std::vector<ClassId>{0, 0, 2, 2}), std::invalid_argument);

  // Prediction identical to a class-1 training tree, disjoint from the class-0 one.
  std::vector<Tree> f{parse_tree(fixture::kPairT0, kUnordered), parse_tree(fixture::kPairT1, kUnordered),
                      parse_tree(fixture::kPairT1, kUnordered)};
  AnnotatedDag a = annotate(f, kUnordered);
  auto w = exponential_weights(a.dag(), 0.5);
  std::vector<MemberId> train{0, 1}, pred{2};
  GramMatrix p = gram(a, w, pred, train);
  CHECK(mean_similarity_classify(p, std::vector<ClassId>{0, 1}) == std::vector<ClassId>{1});
}

TEST_CASE("centroid rule agrees with the Gram rule") {
  std::mt19937_64 rng(109);
  for (int n = 0; n < 20; ++n) {
    std::vector<Tree> f;
    std::vector<ClassId> c;
    for (int i = 0; i < 18; ++i) {
      f.push_back(oracle::random_shared_tree(rng, 20));
      c.push_back(i % 3);
    }
    AnnotatedDag a = annotate(f, kUnordered);
    auto w = exponential_weights(a.dag(), 0.1 * (1 + n % 10));
    Split s = split_thirds(c, n, Scheme::exponential);
    std::vector<ClassId> cols;
    for (MemberId j : s.train) cols.push_back(c[j]);
    auto by_gram = mean_similarity_classify(gram(a, w, s.pred, s.train), cols);
    auto by_centroid = centroid_classify(a, w, s.pred, s.train, c);
    CHECK(by_gram == by_centroid);
    // Repeated training members count with multiplicity in both rules.
    std::vector<MemberId> repeated = s.train;
    for (std::size_t k = 0; k < s.train.size(); k += 2) repeated.push_back(s.train[k]);
    std::vector<ClassId> rep_cols;
    for (MemberId j : repeated) rep_cols.push_back(c[j]);
    CHECK(mean_similarity_classify(gram(a, w, s.pred, repeated), rep_cols) ==
          centroid_classify(a, w, s.pred, repeated, c));
  }
}

TEST_CASE("metrics") {
  std::vector<ClassId> truth{0, 1, 0, 1};
  MetricsReport perfect = evaluate(truth, truth, 2);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f_score == 1.0);

  std::vector<ClassId> zeros{0, 0, 0, 0};
  MetricsReport m = evaluate(zeros, truth, 2);
  CHECK(m.accuracy == 0.5);
  CHECK(m.recall == 0.5);
  CHECK(m.precision == 0.25);  // class 1 has no predicted positives
  CHECK(m.per_class[0].tp == 2);
  CHECK(m.per_class[0].fp == 2);
  CHECK(m.per_class[1].fn == 2);
  CHECK(m.per_class[1].tn == 2);

  CHECK(evaluate(std::vector<ClassId>{1}, std::vector<ClassId>{0}, 2).accuracy == 0.0);
  CHECK_THROWS_AS(evaluate(std::vector<ClassId>{2}, std::vector<ClassId>{0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(std::vector<ClassId>{0, 1}, std::vector<ClassId>{0}, 2), std::invalid_argument);
}

TEST_CASE("metric properties on random predictions") {
  std::mt19937_64 rng(113);
  for (int n = 0; n < 300; ++n) {
    std::size_t K = 2 + rng() % 4, N = 1 + rng() % 40;
    std::vector<ClassId> p(N), t(N);
    for (std::size_t i = 0; i < N; ++i) {
      p[i] = static_cast<ClassId>(rng() % K);
      t[i] = static_cast<ClassId>(rng() % K);
    }
    MetricsReport r = evaluate(p, t, K);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < N; ++i) correct += p[i] == t[i];
    CHECK(r.accuracy == doctest::Approx(double(correct) / N).epsilon(1e-15));
    for (const ClassCounts& c : r.per_class) CHECK(c.tp + c.fp + c.tn + c.fn == N);
    // Relabeling both sides leaves macro metrics unchanged.
    std::vector<ClassId> perm(K);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<ClassId> pp(N), tt(N);
    for (std::size_t i = 0; i < N; ++i) {
      pp[i] = perm[p[i]];
      tt[i] = perm[t[i]];
    }
    MetricsReport q = evaluate(pp, tt, K);
    CHECK(q.accuracy == r.accuracy);
    CHECK(q.precision == doctest::Approx(r.precision).epsilon(1e-12));
    CHECK(q.recall == doctest::Approx(r.recall).epsilon(1e-12));
    CHECK(q.f_score == doctest::Approx(r.f_score).epsilon(1e-12));
  }
}

TEST_CASE("relative improvement") {
  CHECK(relative_improvement(0.9, std::vector<double>{0.3, 0.6, 0.5}) == doctest::Approx(0.5));
  CHECK(relative_improvement(0.6, std::vector<double>{0.6}) == 0.0);
  CHECK(relative_improvement(0.4, std::vector<double>{0.5}) < 0.0);
  CHECK_THROWS_AS(relative_improvement(0.4, std::vector<double>{0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(relative_improvement(0.4, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("experiments are deterministic") {
  Dataset d = small_corpus(3);
  ExperimentConfig cfg;
  cfg.repeats = 3;
  cfg.seed = 11;
  ExperimentResult a = run_experiment(d, cfg);
  ExperimentResult b = run_experiment(d, cfg);
  REQUIRE(a.reports.size() == 3);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(a.reports[r].f_score == b.reports[r].f_score);
    CHECK(a.reports[r].accuracy == b.reports[r].accuracy);
  }
  CHECK(a.mean_f_score() >= 0.0);
  CHECK(a.mean_f_score() <= 1.0);
}

TEST_CASE("a lambda grid reuses one annotation") {
  Dataset d = small_corpus(4);
  AnnotatedDag a = annotate(d.trees, d.mode);
  auto before = a.counters();
  ExperimentConfig cfg;
  cfg.scheme = Scheme::exponential;
  for (int k = 1; k <= 10; ++k) {
    cfg.lambda = 0.1 * k;
    run_experiment(a, d.classes, cfg);
  }
  cfg.scheme = Scheme::discriminance;
  run_experiment(a, d.classes, cfg);
  CHECK(a.counters().origins == before.origins);
  CHECK(a.counters().frequencies == before.frequencies);
  CHECK(a.counters().matching == before.matching);
}

TEST_CASE("noise-free templates are separated") {
  Dataset d = small_corpus(5, 0.0);
  for (Scheme s : {Scheme::exponential, Scheme::discriminance}) {
    ExperimentConfig cfg;
    cfg.scheme = s;
    cfg.repeats = 2;
    CHECK(run_experiment(d, cfg).mean_f_score() == 1.0);
  }
}

TEST_CASE("experiment configuration errors") {
  Dataset d = read_manifest("(())\ta\n(()())\tb\n", kUnordered);
  CHECK_THROWS_AS(run_experiment(d, ExperimentConfig{}), ConfigError);
  Dataset one = read_manifest("(())\ta\n(()())\ta\n((()))\ta\n", kUnordered);
  CHECK_THROWS_AS(run_experiment(one, ExperimentConfig{}), ConfigError);
  Dataset missing = read_manifest("(())\ta\n(()())\tb\n((()))\t-\n", kUnordered);
  CHECK_THROWS_AS(run_experiment(missing, ExperimentConfig{}), ConfigError);
}

}  // TEST_SUITE
