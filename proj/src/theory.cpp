#include "subtree_kernel/theory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "subtree_kernel/errors.hpp"

namespace stk {

namespace {

// Subtree classes of one tree, keyed by interned signature ids.
struct ClassEntry {
  std::uint32_t id;
  std::uint64_t count;
  std::uint32_t height;
};
using Profile = std::vector<ClassEntry>;  // sorted by id

class SignatureInterner {
 public:
  std::uint32_t intern(const Signature& s) {
    auto [it, inserted] = ids_.try_emplace(s, static_cast<std::uint32_t>(ids_.size()));
    return it->second;
  }

 private:
  std::unordered_map<Signature, std::uint32_t> ids_;
};

Profile make_profile(const Tree& tree, const TreeMode& mode, SignatureInterner& interner) {
  auto sigs = subtree_signatures(tree, mode);
  auto hs = heights(tree);
  std::unordered_map<std::uint32_t, ClassEntry> acc;
  for (VertexId v = 0; v < tree.size(); ++v) {
    std::uint32_t id = interner.intern(sigs[v]);
    auto [it, inserted] = acc.try_emplace(id, ClassEntry{id, 0, hs[v]});
    ++it->second.count;
  }
  Profile out;
  out.reserve(acc.size());
  for (auto& [id, e] : acc) out.push_back(e);
  std::sort(out.begin(), out.end(), [](const ClassEntry& a, const ClassEntry& b) { return a.id < b.id; });
  return out;
}

void add_counts(const Profile& a, const Profile& b, HeightCounts& out) {
  std::size_t p = 0, q = 0;
  while (p < a.size() && q < b.size()) {
    if (a[p].id < b[q].id) {
      ++p;
    } else if (b[q].id < a[p].id) {
      ++q;
    } else {
      if (out.size() <= a[p].height) out.resize(a[p].height + 1, 0);
      out[a[p].height] += a[p].count * b[q].count;
      ++p;
      ++q;
    }
  }
}

HeightCounts counts_of(const Profile& a, const Profile& b) {
  HeightCounts out;
  add_counts(a, b, out);
  return out;
}

double dot_double(const std::vector<double>& w, const HeightCounts& c) {
  double s = 0.0;
  for (std::size_t h = 0; h < c.size(); ++h) {
    if (c[h] == 0) continue;
    if (h >= w.size()) throw std::invalid_argument("height weights too short");
    s += w[h] * static_cast<double>(c[h]);
  }
  return s;
}

// Preorder interval labelling for ancestor tests.
struct Intervals {
  std::vector<std::uint32_t> in, out;

  explicit Intervals(const Tree& t) : in(t.size()), out(t.size()) {
    std::uint32_t clock = 0;
    std::vector<std::pair<VertexId, bool>> stack{{t.root(), false}};
    while (!stack.empty()) {
      auto [v, done] = stack.back();
      stack.pop_back();
      if (done) {
        out[v] = clock;
        continue;
      }
      in[v] = clock++;
      stack.emplace_back(v, true);
      auto ch = t.children(v);
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.emplace_back(*it, false);
    }
  }

  // a is an ancestor of b or equal to it.
  bool above(VertexId a, VertexId b) const { return in[a] <= in[b] && in[b] < out[a]; }
  bool family(VertexId v, VertexId z) const { return above(v, z) || above(z, v); }
};

void require_zero_leaf(const HeightWeights& w) {
  if (w.empty() || w[0] != 0) throw std::invalid_argument("the closed form needs a zero leaf weight");
}

// Member of R(v): the family of an internal vertex, the vertex alone for a leaf.
bool in_r(const Tree& t, const Intervals& iv, VertexId v, VertexId z) {
  return t.is_leaf(v) ? z == v : iv.family(v, z);
}

// Per-height sizes of B(x, u).
std::vector<std::uint64_t> b_counts(const Tree& t, const Intervals& iv, const std::vector<std::uint32_t>& hs,
                                    VertexId x, VertexId u) {
  std::vector<std::uint64_t> c(*std::max_element(hs.begin(), hs.end()) + 1, 0);
  for (VertexId z = 0; z < t.size(); ++z) {
    bool member = x == u ? iv.above(x, z) : (in_r(t, iv, x, z) || in_r(t, iv, u, z));
    if (member) ++c[hs[z]];
  }
  return c;
}

std::vector<double> to_doubles(const HeightWeights& w) {
  std::vector<double> out;
  for (const auto& r : w) out.push_back(to_double(r));
  return out;
}

}  // namespace

HeightWeights unit_weights(std::uint32_t max_height, const Rational& leaf) {
  HeightWeights w(max_height + 1, Rational(1));
  w[0] = leaf;
  return w;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational EditDistribution::G(std::uint32_t h) const {
  Rational tail = 0;
  for (std::uint32_t k = h + 1; k <= H; ++k) tail += pmf[k];
  return Rational(1) - tail;
}

EditDistribution edit_distribution(std::uint32_t H, const Rational& rho) {
  if (H == 0) throw std::invalid_argument("model height must be positive");
  if (rho < 0 || rho > H) throw std::invalid_argument("rho must lie in [0, H]");
  EditDistribution d{H, rho, {}};
  Rational p = rho / H;
  Rational q = Rational(1) - p;
  boost::multiprecision::cpp_int choose = 1;
  for (std::uint32_t k = 0; k <= H; ++k) {
    if (k > 0) choose = choose * (H - k + 1) / k;
    Rational term = Rational(choose);
    for (std::uint32_t a = 0; a < k; ++a) term *= p;
    for (std::uint32_t b = k; b < H; ++b) term *= q;
    d.pmf.push_back(term);
  }
  return d;
}

Tree make_broom(std::uint32_t h, std::size_t star_degree) {
  Tree t;
  if (h == 0) return t;
  VertexId v = t.root();
  for (std::uint32_t k = 1; k < h; ++k) v = t.add_child(v);
  for (std::size_t k = 0; k < star_degree; ++k) t.add_child(v);
  return t;
}

ConditionReport check_conditions(const Tree& t0, const Tree& t1, std::span<const Tree> tau, const TreeMode& mode) {
  ConditionReport r;
  std::array<const Tree*, 2> trees{&t0, &t1};
  std::array<std::unordered_set<Signature>, 2> internal;
  for (int i = 0; i < 2; ++i) {
    auto sigs = subtree_signatures(*trees[i], mode);
    r.distinct[i] = true;
    for (VertexId v = 0; v < trees[i]->size(); ++v) {
      if (trees[i]->is_leaf(v)) continue;
      if (!internal[i].insert(sigs[v]).second) r.distinct[i] = false;
    }
  }
  r.disjoint = std::none_of(internal[0].begin(), internal[0].end(),
                            [&](const Signature& s) { return internal[1].count(s) > 0; });

  std::unordered_set<Signature> tau_sigs;
  for (std::size_t h = 1; h < tau.size(); ++h) tau_sigs.insert(canonical_signature(tau[h], mode));
  r.tau_absent = std::none_of(tau_sigs.begin(), tau_sigs.end(), [&](const Signature& s) {
    return internal[0].count(s) > 0 || internal[1].count(s) > 0;
  });

  // Internal classes of each edited tree that do not come from a replacement.
  std::array<std::vector<std::unordered_set<Signature>>, 2> edited_sets;
  bool covered = true;
  for (int i = 0; i < 2; ++i) {
    auto hs = heights(*trees[i]);
    for (VertexId u = 0; u < trees[i]->size(); ++u) {
      if (hs[u] >= tau.size()) {
        covered = false;
        continue;
      }
      Tree e = replace_subtree(*trees[i], u, tau[hs[u]]);
      auto sigs = subtree_signatures(e, mode);
      std::unordered_set<Signature> own;
      for (VertexId v = 0; v < e.size(); ++v)
        if (!e.is_leaf(v) && !tau_sigs.count(sigs[v])) own.insert(sigs[v]);
      edited_sets[i].push_back(std::move(own));
    }
  }
  r.edits_disjoint = covered;
  for (const auto& a : edited_sets[0]) {
    for (const auto& b : edited_sets[1]) {
      const auto& small = a.size() < b.size() ? a : b;
      const auto& large = a.size() < b.size() ? b : a;
      if (std::any_of(small.begin(), small.end(), [&](const Signature& s) { return large.count(s) > 0; })) {
        r.edits_disjoint = false;
        break;
      }
    }
    if (!r.edits_disjoint) break;
  }
  return r;
}

ModelInstance make_instance(Tree t0, Tree t1, const Rational& rho, const TreeMode& mode) {
  std::uint32_t H = height(t0);
  if (height(t1) != H) throw ModelError("model trees must have the same height");
  if (H == 0) throw ModelError("model trees must have positive height");
  ModelInstance m;
  m.H = H;
  m.mode = mode;
  m.dist = edit_distribution(H, rho);
  std::size_t degree = std::max(outdegree(t0), outdegree(t1));
  for (std::uint32_t h = 0; h <= H; ++h) m.tau.push_back(make_broom(h, degree + 1));
  m.trees = {std::move(t0), std::move(t1)};
  ConditionReport r = check_conditions(m.trees[0], m.trees[1], m.tau, mode);
  if (!r.ok()) throw ModelError("model trees violate the separation conditions");
  for (int i = 0; i < 2; ++i) {
    m.heights[i] = heights(m.trees[i]);
    m.per_height[i].assign(H + 1, 0);
    for (std::uint32_t h : m.heights[i]) ++m.per_height[i][h];
  }
  return m;
}

namespace {

// Caterpillar-like growth: every internal vertex keeps one child one level
// lower, the other slots are leaves or occasional shorter branches.
void grow(Tree& t, VertexId v, std::uint32_t k, const std::vector<std::size_t>& degrees, std::mt19937_64& rng) {
  if (k == 0) return;
  std::size_t d = degrees[std::uniform_int_distribution<std::size_t>(0, degrees.size() - 1)(rng)];
  std::size_t spine = std::uniform_int_distribution<std::size_t>(0, d - 1)(rng);
  std::bernoulli_distribution branch(0.35 / static_cast<double>(d - 1));
  for (std::size_t c = 0; c < d; ++c) {
    VertexId child = t.add_child(v);
    if (c == spine) {
      grow(t, child, k - 1, degrees, rng);
    } else if (k >= 2 && branch(rng)) {
      grow(t, child, std::uniform_int_distribution<std::uint32_t>(1, k - 1)(rng), degrees, rng);
    }
  }
}

}  // namespace

ModelInstance build_model(std::uint32_t H, const Rational& rho, std::uint64_t seed, const TreeMode& mode,
                          int max_attempts) {
  if (H < 2) throw std::invalid_argument("model height must be at least 2");
  if (mode.labeled) throw std::invalid_argument("the model uses unlabeled trees");
  std::mt19937_64 rng(seed);
  // Disjoint outdegree ranges separate the two classes; no vertex has a
  // single child, so brooms (whose chains do) never occur inside them.
  const std::vector<std::size_t> small{2, 3, 4};
  const std::vector<std::size_t> large{5, 6, 7};
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Tree t0, t1;
    grow(t0, t0.root(), H, small, rng);
    grow(t1, t1.root(), H, large, rng);
    try {
      ModelInstance m = make_instance(std::move(t0), std::move(t1), rho, mode);
      if (leaf_count_identities_hold(m)) return m;
    } catch (const ModelError&) {
    }
  }
  throw ModelError("no valid model found after " + std::to_string(max_attempts) + " attempts");
}

Tree edited(const ModelInstance& model, int i, VertexId u) {
  const Tree& t = model.trees.at(i);
  return replace_subtree(t, u, model.tau[model.heights[i].at(u)]);
}

std::pair<Tree, VertexId> sample_edited(const ModelInstance& model, int i, std::mt19937_64& rng) {
  std::binomial_distribution<std::uint32_t> heights_law(model.H, to_double(model.dist.rho) / model.H);
  std::uint32_t h = heights_law(rng);
  std::vector<VertexId> candidates;
  for (VertexId v = 0; v < model.trees[i].size(); ++v)
    if (model.heights[i][v] == h) candidates.push_back(v);
  VertexId u = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
  return {edited(model, i, u), u};
}

HeightCounts kernel_height_counts(const Tree& t1, const Tree& t2, const TreeMode& mode) {
  SignatureInterner interner;
  return counts_of(make_profile(t1, mode, interner), make_profile(t2, mode, interner));
}

Rational dot(const HeightWeights& w, const HeightCounts& counts) {
  Rational s = 0;
  for (std::size_t h = 0; h < counts.size(); ++h) {
    if (counts[h] == 0) continue;
    if (h >= w.size()) throw std::invalid_argument("height weights too short");
    s += w[h] * counts[h];
  }
  return s;
}

Rational kernel_exact(const Tree& t1, const Tree& t2, const TreeMode& mode, const HeightWeights& w) {
  return dot(w, kernel_height_counts(t1, t2, mode));
}

EditSpace::EditSpace(const ModelInstance& model) : model_(model) {
  SignatureInterner interner;
  std::array<std::vector<Profile>, 2> profiles;
  for (int i = 0; i < 2; ++i) {
    for (VertexId u = 0; u < model.trees[i].size(); ++u) {
      Tree e = edited(model, i, u);
      profiles[i].push_back(make_profile(e, model.mode, interner));
      edited_leaves_[i].push_back(leaf_count(e));
    }
  }
  const std::uint32_t H = model.H;
  // Probability of picking one given vertex of height h in T_i.
  auto pick = [&](int i, std::uint32_t h) { return model.dist.pmf[h] / model.per_height[i][h]; };

  for (int i = 0; i < 2; ++i) {
    expected_leaves_[i] = 0;
    for (VertexId u = 0; u < model.trees[i].size(); ++u)
      expected_leaves_[i] += pick(i, model.heights[i][u]) * edited_leaves_[i][u];
  }

  for (int i = 0; i < 2; ++i) {
    const std::size_t n = model.trees[i].size();
    same_[i].resize(n);
    cross_[i].resize(n);
    for (VertexId x = 0; x < n; ++x) {
      for (int other = 0; other < 2; ++other) {
        const int j = other == 0 ? i : 1 - i;
        // Integer count vectors grouped by the height of the edited vertex.
        std::vector<HeightCounts> grouped(H + 1);
        for (VertexId u = 0; u < model.trees[j].size(); ++u)
          add_counts(profiles[i][x], profiles[j][u], grouped[model.heights[j][u]]);
        std::vector<Rational> expectation(H + 1, Rational(0));
        for (std::uint32_t hu = 0; hu <= H; ++hu) {
          if (model.per_height[j][hu] == 0) continue;
          Rational p = pick(j, hu);
          for (std::size_t h = 0; h < grouped[hu].size(); ++h)
            if (grouped[hu][h] != 0) expectation.at(h) += p * grouped[hu][h];
        }
        (other == 0 ? same_ : cross_)[i][x] = std::move(expectation);
      }
    }
  }
}

Rational EditSpace::contrast(const HeightWeights& w, int i, VertexId x) const {
  const auto& a = same_.at(i).at(x);
  const auto& b = cross_.at(i).at(x);
  if (w.size() < a.size()) throw std::invalid_argument("height weights too short");
  Rational s = 0;
  for (std::size_t h = 0; h < a.size(); ++h) s += w[h] * (a[h] - b[h]);
  return s;
}

Rational contrast_exact(const ModelInstance& model, const HeightWeights& w, int i, VertexId x) {
  require_zero_leaf(w);
  const Tree& t = model.trees.at(i);
  if (!t.contains(x)) throw std::out_of_range("vertex not in model tree");
  const auto& hs = model.heights[i];
  Intervals iv(t);
  const std::uint32_t H = model.H;
  std::vector<std::vector<std::uint64_t>> grouped(H + 1, std::vector<std::uint64_t>(H + 1, 0));
  for (VertexId u = 0; u < t.size(); ++u) {
    auto c = b_counts(t, iv, hs, x, u);
    for (std::size_t h = 0; h < c.size(); ++h) grouped[hs[u]][h] += c[h];
  }
  Rational expected = 0;
  for (std::uint32_t hu = 0; hu <= H; ++hu) {
    if (model.per_height[i][hu] == 0) continue;
    Rational inner = 0;
    for (std::uint32_t h = 0; h <= H; ++h) inner += w.at(h) * grouped[hu][h];
    expected += model.dist.pmf[hu] / model.per_height[i][hu] * inner;
  }
  return kernel_exact(t, t, model.mode, w) - expected;
}

MonteCarloEstimate contrast_monte_carlo(const ModelInstance& model, const HeightWeights& w, int i, VertexId x,
                                        std::size_t samples, std::mt19937_64& rng) {
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  SignatureInterner interner;
  const Profile base = make_profile(edited(model, i, x), model.mode, interner);
  std::array<std::unordered_map<VertexId, Profile>, 2> cache;
  auto profile_of = [&](int j, VertexId u) -> const Profile& {
    auto it = cache[j].find(u);
    if (it == cache[j].end()) it = cache[j].emplace(u, make_profile(edited(model, j, u), model.mode, interner)).first;
    return it->second;
  };
  const std::vector<double> wd = to_doubles(w);
  std::binomial_distribution<std::uint32_t> law(model.H, to_double(model.dist.rho) / model.H);
  std::array<std::vector<std::vector<VertexId>>, 2> by_height;
  for (int j = 0; j < 2; ++j) {
    by_height[j].resize(model.H + 1);
    for (VertexId v = 0; v < model.trees[j].size(); ++v) by_height[j][model.heights[j][v]].push_back(v);
  }
  auto draw = [&](int j) {
    const auto& pool = by_height[j][law(rng)];
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  };
  double mean = 0.0, m2 = 0.0;
  for (std::size_t s = 1; s <= samples; ++s) {
    VertexId u = draw(i);
    VertexId v = draw(1 - i);
    double d = dot_double(wd, counts_of(base, profile_of(i, u))) - dot_double(wd, counts_of(base, profile_of(1 - i, v)));
    double step = d - mean;
    mean += step / static_cast<double>(s);
    m2 += step * (d - mean);
  }
  double var = m2 / static_cast<double>(samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(samples))};
}

Rational k_max_at_height(const ModelInstance& model, const HeightWeights& w, int i, std::uint32_t h) {
  const Tree& t = model.trees.at(i);
  std::optional<Rational> best;
  for (VertexId u = 0; u < t.size(); ++u) {
    if (model.heights[i][u] != h) continue;
    Tree sub = subtree(t, u);
    Rational k = kernel_exact(sub, sub, model.mode, w);
    if (!best || k > *best) best = k;
  }
  if (!best) throw std::invalid_argument("no vertex of height " + std::to_string(h));
  return *best;
}

Rational c_coefficient(const ModelInstance& model, const HeightWeights& w, int i, std::uint32_t h) {
  const Tree& t = model.trees.at(i);
  return (kernel_exact(t, t, model.mode, w) - k_max_at_height(model, w, i, h)) / leaf_count(t);
}

Prop1Report check_prop1(const EditSpace& space, const HeightWeights& w, std::uint32_t h) {
  const ModelInstance& model = space.model();
  if (h >= model.H) throw std::invalid_argument("h must be below the model height");
  Prop1Report r;
  r.h = h;
  r.G = model.dist.G(h);
  r.asserted = model.dist.rho * 2 > model.H;
  for (int i = 0; i < 2; ++i) {
    r.bound[i] = model.dist.pmf[0] * c_coefficient(model, w, i, h);
    bool first = true;
    for (VertexId x = 0; x < model.trees[i].size(); ++x) {
      Prop1Row row;
      row.tree = i;
      row.x = x;
      row.height = model.heights[i][x];
      row.delta = space.contrast(w, i, x);
      row.bound = r.bound[i];
      if (contrast_exact(model, w, i, x) != row.delta) r.closed_form_matches = false;
      if ((row.delta == 0) != (x == model.trees[i].root())) r.zero_iff_root = false;
      if (row.height <= h) {
        row.asserted = r.asserted;
        row.pass = row.delta >= row.bound;
        if (first || row.delta < r.min_delta[i]) r.min_delta[i] = row.delta;
        first = false;
        if (r.asserted && !row.pass) r.pass[i] = false;
      }
      r.rows.push_back(std::move(row));
    }
  }
  return r;
}

double sufficient_size_real(const ModelInstance& model, const HeightWeights& w, std::uint32_t h, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  Rational max_k = 0;
  std::optional<Rational> min_c;
  for (int i = 0; i < 2; ++i) {
    max_k = std::max(max_k, kernel_exact(model.trees[i], model.trees[i], model.mode, w));
    Rational c = c_coefficient(model, w, i, h);
    if (!min_c || c < *min_c) min_c = c;
  }
  if (*min_c == 0) throw DegenerateBoundError("C coefficient vanishes at height " + std::to_string(h));
  double ratio = to_double(max_k * max_k / (*min_c * *min_c));
  double rho = to_double(model.dist.rho);
  double H = static_cast<double>(model.H);
  return 2.0 * ratio * std::exp(2.0 * rho) / (H * H) * std::log(2.0 / delta);
}

std::uint64_t sufficient_size(const ModelInstance& model, const HeightWeights& w, std::uint32_t h, double delta) {
  return static_cast<std::uint64_t>(std::ceil(sufficient_size_real(model, w, h, delta)));
}

Prop2Report check_prop2(const EditSpace& space, const HeightWeights& w, const Rational& w_leaf) {
  require_zero_leaf(w);
  if (w_leaf <= 0) throw std::invalid_argument("leaf weight must be positive");
  const ModelInstance& model = space.model();
  HeightWeights plus = w;
  plus[0] = w_leaf;
  Prop2Report r;
  for (int i = 0; i < 2; ++i) r.D[i] = space.expected_leaves(i) - space.expected_leaves(1 - i);

  std::optional<Rational> min_delta, min_plus;
  std::array<bool, 2> not_increased{true, true};
  for (int i = 0; i < 2; ++i) {
    const Tree& t = model.trees[i];
    for (VertexId x = 0; x < t.size(); ++x) {
      Prop2Row row;
      row.tree = i;
      row.x = x;
      row.delta = space.contrast(w, i, x);
      row.delta_plus = space.contrast(plus, i, x);
      row.literal_term = w_leaf * leaf_count(t, x) * r.D[i];
      row.edited_term = w_leaf * space.edited_leaves(i, x) * r.D[i];
      Rational gap = row.delta_plus - row.delta;
      if (gap != row.literal_term) r.literal_identity = false;
      if (gap != row.edited_term) r.edited_identity = false;
      if (row.delta_plus > row.delta) not_increased[i] = false;
      if (x != t.root()) {
        if (!min_delta || row.delta < *min_delta) min_delta = row.delta;
        if (!min_plus || row.delta_plus < *min_plus) min_plus = row.delta_plus;
      }
      r.rows.push_back(std::move(row));
    }
  }
  for (int i = 0; i < 2; ++i)
    if (r.D[i] <= 0 && not_increased[i]) r.some_class_not_increased = true;
  r.min_not_increased = min_delta && min_plus && *min_plus <= *min_delta;
  return r;
}

bool leaf_count_identities_hold(const ModelInstance& model) {
  const HeightWeights w = unit_weights(model.H);
  SignatureInterner interner;
  std::array<std::vector<Profile>, 2> profiles;
  for (int i = 0; i < 2; ++i)
    for (VertexId u = 0; u < model.trees[i].size(); ++u)
      profiles[i].push_back(make_profile(edited(model, i, u), model.mode, interner));
  std::vector<Profile> tau;
  for (const Tree& t : model.tau) tau.push_back(make_profile(t, model.mode, interner));

  for (int i = 0; i < 2; ++i) {
    const Tree& t = model.trees[i];
    const auto& hs = model.heights[i];
    Intervals iv(t);
    Rational self = kernel_exact(t, t, model.mode, w);
    for (VertexId u = 0; u < t.size(); ++u) {
      for (VertexId v = 0; v < t.size(); ++v) {
        Rational lhs = dot(w, counts_of(profiles[i][u], profiles[i][v]));
        auto b = b_counts(t, iv, hs, u, v);
        Rational removed = 0;
        for (std::size_t h = 0; h < b.size(); ++h) removed += w[h] * b[h];
        Rational rhs = self - removed + dot(w, counts_of(tau[hs[u]], tau[hs[v]]));
        if (lhs != rhs) return false;
      }
    }
  }
  for (VertexId u = 0; u < model.trees[0].size(); ++u) {
    for (VertexId v = 0; v < model.trees[1].size(); ++v) {
      Rational lhs = dot(w, counts_of(profiles[0][u], profiles[1][v]));
      Rational rhs = dot(w, counts_of(tau[model.heights[0][u]], tau[model.heights[1][v]]));
      if (lhs != rhs) return false;
    }
  }
  return true;
}

}  // namespace stk
