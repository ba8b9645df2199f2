#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "subtree_kernel/annotate.hpp"

namespace stk {

using ClassId = std::int32_t;
inline constexpr ClassId kNoClass = -1;

enum class ShapingKind { identity, smoothstep, smoothstep2, threshold };

struct ShapingFn {
  ShapingKind kind = ShapingKind::smoothstep;
  double eps = 0.3;  // threshold only
};

// f(x) for x <= 1; 0 whenever x <= 0. Throws std::invalid_argument for x > 1.
double shape(const ShapingFn& f, double x);
double smoothstep(double x);
ShapingFn parse_shaping(const std::string& name, double eps = 0.3);
std::string to_string(const ShapingFn& f);

// Nearest point of interest: e_k (presence in class k only) or its complement.
struct NearestPoint {
  std::size_t k = 0;
  bool presence = true;
  double distance = 0.0;
};

// Ties go to the smaller k, then to e_k over its complement.
NearestPoint nearest_point(std::span<const double> rho);
double delta(std::span<const double> rho);

struct ClassProfile {
  std::size_t classes = 0;
  std::vector<std::size_t> class_sizes;
  // rho[v * classes + k]
  std::vector<double> rho;
  std::vector<double> delta;

  std::span<const double> rho_of(VertexId v) const { return {rho.data() + v * classes, classes}; }
};

// `classes[i]` is the class of member i (0..K-1) or kNoClass. Only members in
// `weight_train` contribute. Throws std::invalid_argument on an empty class
// or an unlabeled training member.
ClassProfile class_profile(const AnnotatedDag& annotated, std::span<const ClassId> classes,
                           std::span<const MemberId> weight_train);

std::vector<double> exponential_weights(const Dag& dag, double lambda);
std::vector<double> discriminance_weights(const ClassProfile& profile, const ShapingFn& f);

// "vertex_id,height,delta,weight"; delta left empty without a profile.
std::string weight_table_csv(const Dag& dag, std::span<const double> weights,
                             const ClassProfile* profile = nullptr);

struct HeightSummary {
  std::uint32_t height = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

// Type-7 quantile of sorted data, p in [0, 1].
double quantile7(std::span<const double> sorted, double p);
// Weight distribution per height; the artificial root is left out.
std::vector<HeightSummary> weight_histogram(const Dag& dag, std::span<const double> weights);
std::string weight_histogram_csv(std::span<const HeightSummary> rows);

}  // namespace stk
