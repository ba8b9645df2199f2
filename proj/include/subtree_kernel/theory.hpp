#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "subtree_kernel/tree.hpp"

namespace stk {

using Rational = boost::multiprecision::cpp_rational;

// Weight of a subtree as a function of its height only: w[h], h = 0..H.
using HeightWeights = std::vector<Rational>;

HeightWeights unit_weights(std::uint32_t max_height, const Rational& leaf = 0);
double to_double(const Rational& r);

// Binomial law B(H, rho/H) of the edited height.
struct EditDistribution {
  std::uint32_t H = 0;
  Rational rho;
  std::vector<Rational> pmf;  // pmf[k], k = 0..H

  // Probability that the edited vertex has height <= h.
  Rational G(std::uint32_t h) const;
};

EditDistribution edit_distribution(std::uint32_t H, const Rational& rho);

// "Broom" of height h: a chain of h - 1 vertices above a star with
// `star_degree` leaves. Height 0 is a single leaf.
Tree make_broom(std::uint32_t h, std::size_t star_degree);

struct ConditionReport {
  // Internal subtrees of each tree pairwise non-isomorphic.
  std::array<bool, 2> distinct{false, false};
  // No internal subtree shared by the two trees.
  bool disjoint = false;
  // No replacement tree of positive height occurs in either tree.
  bool tau_absent = false;
  // After any pair of edits, shared internal subtrees come from the replacements only.
  bool edits_disjoint = false;

  bool ok() const { return distinct[0] && distinct[1] && disjoint && tau_absent && edits_disjoint; }
};

// Checks the model conditions by signature comparison. `tau[h]` is the
// replacement for height h; heights missing from `tau` skip the edit checks.
ConditionReport check_conditions(const Tree& t0, const Tree& t1, std::span<const Tree> tau, const TreeMode& mode);

struct ModelInstance {
  std::array<Tree, 2> trees;
  std::vector<Tree> tau;  // tau[h], h = 0..H
  std::uint32_t H = 0;
  EditDistribution dist;
  TreeMode mode;

  std::array<std::vector<std::uint32_t>, 2> heights;
  // Number of vertices of each height, per tree.
  std::array<std::vector<std::size_t>, 2> per_height;
};

// Assembles an instance from two trees of equal height and broom
// replacements; throws ModelError when the conditions fail.
ModelInstance make_instance(Tree t0, Tree t1, const Rational& rho, const TreeMode& mode = {});

// Random pair of trees of height H satisfying the model conditions, with the
// within-class and cross-class edit identities checked on every vertex pair.
// Throws ModelError after `max_attempts` rejected candidates.
ModelInstance build_model(std::uint32_t H, const Rational& rho, std::uint64_t seed, const TreeMode& mode = {},
                          int max_attempts = 200);

// T_i with T_i[u] replaced by tau[height(u)].
Tree edited(const ModelInstance& model, int i, VertexId u);
// Draws h from the edit law, then u uniformly among vertices of height h.
std::pair<Tree, VertexId> sample_edited(const ModelInstance& model, int i, std::mt19937_64& rng);

// Sum over common subtree classes of height h of N(t1) N(t2), for each h.
using HeightCounts = std::vector<std::uint64_t>;
HeightCounts kernel_height_counts(const Tree& t1, const Tree& t2, const TreeMode& mode);
Rational dot(const HeightWeights& w, const HeightCounts& counts);
Rational kernel_exact(const Tree& t1, const Tree& t2, const TreeMode& mode, const HeightWeights& w);

// Exact expectations over the whole edit space of one model. For each class
// i and vertex x of T_i, keeps E_u[counts(T_i^x, T_i^u)] and
// E_v[counts(T_i^x, T_{1-i}^v)] as rational vectors, so any height weights
// can be applied afterwards.
class EditSpace {
 public:
  explicit EditSpace(const ModelInstance& model);

  const ModelInstance& model() const { return model_; }
  // Definition of the contrast: E_u K(T_i^x, T_i^u) - E_v K(T_i^x, T_{1-i}^v).
  Rational contrast(const HeightWeights& w, int i, VertexId x) const;
  // E_u #leaves(T_i^u).
  const Rational& expected_leaves(int i) const { return expected_leaves_[i]; }
  // #leaves(T_i^x).
  std::size_t edited_leaves(int i, VertexId x) const { return edited_leaves_[i][x]; }

 private:
  const ModelInstance& model_;
  std::array<std::vector<std::vector<Rational>>, 2> same_;
  std::array<std::vector<std::vector<Rational>>, 2> cross_;
  std::array<Rational, 2> expected_leaves_;
  std::array<std::vector<std::size_t>, 2> edited_leaves_;
};

// Closed form K(T_i,T_i) - sum_u P(h(u))/c_{h(u)} sum_{z in B(x,u)} w_{h(z)}.
// B(x,x) = {x} + des(x); for u != x, B(x,u) = R(x) + R(u) where R is the
// family (ancestors, self, descendants) of an internal vertex and {u} for a
// leaf, whose edit leaves the tree unchanged. Needs w[0] = 0.
Rational contrast_exact(const ModelInstance& model, const HeightWeights& w, int i, VertexId x);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

MonteCarloEstimate contrast_monte_carlo(const ModelInstance& model, const HeightWeights& w, int i, VertexId x,
                                        std::size_t samples, std::mt19937_64& rng);

// max over u of height h of K(T_i[u], T_i[u]).
Rational k_max_at_height(const ModelInstance& model, const HeightWeights& w, int i, std::uint32_t h);
// (K(T_i,T_i) - K_{i,h}) / #leaves(T_i).
Rational c_coefficient(const ModelInstance& model, const HeightWeights& w, int i, std::uint32_t h);

struct Prop1Row {
  int tree = 0;
  VertexId x = 0;
  std::uint32_t height = 0;
  Rational delta;
  Rational bound;
  bool asserted = false;
  bool pass = true;
};

struct Prop1Report {
  std::uint32_t h = 0;
  Rational G;
  bool asserted = false;  // rho > H/2
  std::array<Rational, 2> min_delta;
  std::array<Rational, 2> bound;
  std::array<bool, 2> pass{true, true};
  // Delta is zero exactly at the roots.
  bool zero_iff_root = true;
  // Closed form equals the definition for every x.
  bool closed_form_matches = true;
  std::vector<Prop1Row> rows;

  bool ok() const { return pass[0] && pass[1] && zero_iff_root && closed_form_matches; }
};

Prop1Report check_prop1(const EditSpace& space, const HeightWeights& w, std::uint32_t h);

// Training size of the plug-in bound. Throws DegenerateBoundError when
// min_i C_{i,h} = 0 and std::invalid_argument unless 0 < delta < 1.
std::uint64_t sufficient_size(const ModelInstance& model, const HeightWeights& w, std::uint32_t h, double delta);
double sufficient_size_real(const ModelInstance& model, const HeightWeights& w, std::uint32_t h, double delta);

struct Prop2Row {
  int tree = 0;
  VertexId x = 0;
  Rational delta;
  Rational delta_plus;
  // w_leaf #leaves(T_i[x]) D_{i,1-i}
  Rational literal_term;
  // w_leaf #leaves(T_i^x) D_{i,1-i}
  Rational edited_term;
};

struct Prop2Report {
  std::array<Rational, 2> D;  // D[i] = D_{i,1-i}
  std::vector<Prop2Row> rows;
  bool literal_identity = true;
  bool edited_identity = true;
  // Some i with D_{i,1-i} <= 0 has Delta+ <= Delta at every x of T_i.
  bool some_class_not_increased = false;
  // min over (i, non-root x) of Delta+ <= the same min of Delta.
  bool min_not_increased = false;
};

// `w` must have w[0] = 0; the leaf weight is replaced by w_leaf for Delta+.
Prop2Report check_prop2(const EditSpace& space, const HeightWeights& w, const Rational& w_leaf);

// Within-class and cross-class edit identities on every vertex pair, unit weights.
bool leaf_count_identities_hold(const ModelInstance& model);

}  // namespace stk
