#include "subtree_kernel/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "subtree_kernel/errors.hpp"

namespace stk {

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 3.0 * x * x - 2.0 * x * x * x;
}

double shape(const ShapingFn& f, double x) {
  if (std::isnan(x) || x > 1.0) throw std::invalid_argument("shaping input must be <= 1");
  if (x <= 0.0) return 0.0;
  switch (f.kind) {
    case ShapingKind::identity: return x;
    case ShapingKind::smoothstep: return smoothstep(x);
    case ShapingKind::smoothstep2: return smoothstep(smoothstep(x));
    case ShapingKind::threshold: return x > f.eps ? 1.0 : 0.0;
  }
  return 0.0;
}

ShapingFn parse_shaping(const std::string& name, double eps) {
  if (name == "id" || name == "identity") return {ShapingKind::identity, eps};
  if (name == "smooth" || name == "smoothstep") return {ShapingKind::smoothstep, eps};
  if (name == "smooth2") return {ShapingKind::smoothstep2, eps};
  if (name == "thresh" || name == "threshold") {
    if (!(eps >= 0.0 && eps < 1.0)) throw ConfigError("threshold eps must lie in [0, 1)");
    return {ShapingKind::threshold, eps};
  }
  throw ConfigError("unknown shaping function '" + name + "'");
}

std::string to_string(const ShapingFn& f) {
  switch (f.kind) {
    case ShapingKind::identity: return "id";
    case ShapingKind::smoothstep: return "smooth";
    case ShapingKind::smoothstep2: return "smooth2";
    case ShapingKind::threshold: return "thresh";
  }
  return "?";
}

NearestPoint nearest_point(std::span<const double> rho) {
  const std::size_t K = rho.size();
  if (K == 0) throw std::invalid_argument("empty class profile");
  NearestPoint best{0, true, INFINITY};
  for (std::size_t k = 0; k < K; ++k) {
    double present = 0.0, absent = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      double on = j == k ? 1.0 : 0.0;
      present += (rho[j] - on) * (rho[j] - on);
      absent += (rho[j] - (1.0 - on)) * (rho[j] - (1.0 - on));
    }
    present = std::sqrt(present);
    absent = std::sqrt(absent);
    if (present < best.distance) best = {k, true, present};
    if (absent < best.distance) best = {k, false, absent};
  }
  return best;
}

double delta(std::span<const double> rho) { return nearest_point(rho).distance; }

ClassProfile class_profile(const AnnotatedDag& annotated, std::span<const ClassId> classes,
                           std::span<const MemberId> weight_train) {
  const std::size_t n = annotated.member_count();
  if (classes.size() != n) throw std::invalid_argument("class table size differs from dataset size");
  std::vector<MemberId> train(weight_train.begin(), weight_train.end());
  std::sort(train.begin(), train.end());
  train.erase(std::unique(train.begin(), train.end()), train.end());

  ClassProfile profile;
  ClassId top = -1;
  for (MemberId i : train) {
    if (i >= n) throw std::invalid_argument("weight-training index out of range");
    if (classes[i] < 0) throw std::invalid_argument("weight-training member " + std::to_string(i) + " has no class");
    top = std::max(top, classes[i]);
  }
  if (top < 0) throw std::invalid_argument("no weight-training members");
  profile.classes = static_cast<std::size_t>(top) + 1;
  profile.class_sizes.assign(profile.classes, 0);
  for (MemberId i : train) ++profile.class_sizes[classes[i]];
  for (std::size_t k = 0; k < profile.classes; ++k)
    if (profile.class_sizes[k] == 0) throw std::invalid_argument("class " + std::to_string(k) + " is empty");

  const Dag& dag = annotated.dag();
  const std::size_t K = profile.classes;
  profile.rho.assign(dag.size() * K, 0.0);
  profile.delta.assign(dag.size(), 0.0);
  std::vector<std::size_t> hits(K);
  for (VertexId v = 0; v < dag.size(); ++v) {
    std::fill(hits.begin(), hits.end(), 0);
    // Both lists are sorted: one merge scan.
    auto o = annotated.origins(v);
    std::size_t p = 0, q = 0;
    while (p < o.size() && q < train.size()) {
      if (o[p] < train[q]) {
        ++p;
      } else if (train[q] < o[p]) {
        ++q;
      } else {
        ++hits[classes[train[q]]];
        ++p;
        ++q;
      }
    }
    for (std::size_t k = 0; k < K; ++k)
      profile.rho[v * K + k] = static_cast<double>(hits[k]) / static_cast<double>(profile.class_sizes[k]);
    profile.delta[v] = delta(profile.rho_of(v));
  }
  return profile;
}

std::vector<double> exponential_weights(const Dag& dag, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  std::vector<double> w(dag.size());
  for (VertexId v = 0; v < dag.size(); ++v) {
    std::uint32_t h = dag.vertex(v).height;
    // 0^0 = 1: lambda = 0 keeps the leaves.
    w[v] = h == 0 ? 1.0 : std::pow(lambda, static_cast<double>(h));
  }
  return w;
}

std::vector<double> discriminance_weights(const ClassProfile& profile, const ShapingFn& f) {
  std::vector<double> w(profile.delta.size());
  for (std::size_t v = 0; v < w.size(); ++v) w[v] = shape(f, 1.0 - profile.delta[v]);
  return w;
}

std::string weight_table_csv(const Dag& dag, std::span<const double> weights, const ClassProfile* profile) {
  if (weights.size() != dag.size()) throw std::invalid_argument("weight table size differs from DAG size");
  std::ostringstream out;
  out.precision(17);
  out << "vertex_id,height,delta,weight\n";
  for (VertexId v = 0; v < dag.size(); ++v) {
    if (dag.has_artificial_root() && v == dag.root()) continue;
    out << v << ',' << dag.vertex(v).height << ',';
    if (profile) out << profile->delta[v];
    out << ',' << weights[v] << '\n';
  }
  return out.str();
}

double quantile7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  double pos = p * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<HeightSummary> weight_histogram(const Dag& dag, std::span<const double> weights) {
  if (weights.size() != dag.size()) throw std::invalid_argument("weight table size differs from DAG size");
  std::vector<std::vector<double>> by_height;
  for (VertexId v = 0; v < dag.size(); ++v) {
    if (dag.has_artificial_root() && v == dag.root()) continue;
    std::uint32_t h = dag.vertex(v).height;
    if (by_height.size() <= h) by_height.resize(h + 1);
    by_height[h].push_back(weights[v]);
  }
  std::vector<HeightSummary> rows;
  for (std::uint32_t h = 0; h < by_height.size(); ++h) {
    auto& xs = by_height[h];
    if (xs.empty()) continue;
    std::sort(xs.begin(), xs.end());
    double sum = 0.0;
    for (double x : xs) sum += x;
    rows.push_back({h, xs.front(), quantile7(xs, 0.25), quantile7(xs, 0.5), quantile7(xs, 0.75), xs.back(),
                    sum / static_cast<double>(xs.size())});
  }
  return rows;
}

std::string weight_histogram_csv(std::span<const HeightSummary> rows) {
  std::ostringstream out;
  out.precision(17);
  out << "height,min,q1,median,q3,max,mean\n";
  for (const auto& r : rows)
    out << r.height << ',' << r.min << ',' << r.q1 << ',' << r.median << ',' << r.q3 << ',' << r.max << ','
        << r.mean << '\n';
  return out.str();
}

}  // namespace stk
