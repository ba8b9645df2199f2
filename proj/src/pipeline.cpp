#include "subtree_kernel/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "subtree_kernel/errors.hpp"

namespace stk {

ClassId Dataset::class_id(const std::string& name) {
  auto it = std::find(class_names.begin(), class_names.end(), name);
  if (it != class_names.end()) return static_cast<ClassId>(it - class_names.begin());
  class_names.push_back(name);
  return static_cast<ClassId>(class_names.size() - 1);
}

void Dataset::add(Tree tree, ClassId cls, Role role) {
  trees.push_back(std::move(tree));
  classes.push_back(cls);
  roles.push_back(role);
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, '\t')) out.push_back(field);
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \r\n");
  return s.substr(b, e - b + 1);
}

Role parse_role(const std::string& s, std::size_t line) {
  if (s.empty() || s == "-") return Role::none;
  if (s == "weight") return Role::weight;
  if (s == "train") return Role::train;
  if (s == "pred") return Role::pred;
  throw ParseError("unknown role '" + s + "'", line, 1);
}

const char* role_name(Role r) {
  switch (r) {
    case Role::weight: return "weight";
    case Role::train: return "train";
    case Role::pred: return "pred";
    case Role::none: break;
  }
  return "-";
}

}  // namespace

Dataset read_manifest(std::string_view text, const TreeMode& mode, const std::filesystem::path& base_dir) {
  Dataset data;
  data.mode = mode;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    auto fields = split_tabs(line);
    std::string source = trim(fields[0]);
    std::string tree_text;
    if (!source.empty() && source[0] == '@') {
      std::filesystem::path p = source.substr(1);
      if (p.is_relative()) p = base_dir / p;
      std::ifstream f(p);
      if (!f) throw ParseError("cannot open tree file '" + p.string() + "'", line_no, 1);
      std::ostringstream buf;
      buf << f.rdbuf();
      tree_text = buf.str();
    } else {
      tree_text = source;
    }
    Tree tree = [&] {
      try {
        return parse_tree(tree_text, mode, data.alphabet);
      } catch (const ParseError& e) {
        throw ParseError("manifest line " + std::to_string(line_no) + ": " + e.what(), 0, 0);
      }
    }();
    ClassId cls = kNoClass;
    if (fields.size() > 1) {
      std::string c = trim(fields[1]);
      if (!c.empty() && c != "-") cls = data.class_id(c);
    }
    Role role = fields.size() > 2 ? parse_role(trim(fields[2]), line_no) : Role::none;
    data.add(std::move(tree), cls, role);
  }
  return data;
}

std::string write_manifest(const Dataset& data) {
  std::ostringstream out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << serialize_tree(data.trees[i], data.mode.labeled ? &data.alphabet : nullptr) << '\t';
    out << (data.classes[i] == kNoClass ? std::string("-") : data.class_names.at(data.classes[i])) << '\t';
    out << role_name(data.roles[i]) << '\n';
  }
  return out.str();
}

Split split_thirds(std::span<const ClassId> classes, std::uint64_t seed, Scheme scheme,
                   std::vector<std::string>* warnings) {
  std::mt19937_64 rng(seed);
  ClassId top = -1;
  for (ClassId c : classes) top = std::max(top, c);
  std::vector<std::vector<MemberId>> by_class(static_cast<std::size_t>(top + 1));
  Split split;
  for (MemberId i = 0; i < classes.size(); ++i) {
    if (classes[i] == kNoClass) {
      split.pred.push_back(i);
    } else {
      by_class[classes[i]].push_back(i);
    }
  }
  // Shuffle within classes, then deal the concatenation round robin so both
  // the thirds and each class's share of them differ by at most one.
  std::vector<MemberId> dealt;
  for (std::size_t k = 0; k < by_class.size(); ++k) {
    auto& members = by_class[k];
    if (members.size() < 3 && warnings && scheme == Scheme::discriminance)
      warnings->push_back("class " + std::to_string(k) + " has fewer than 3 members");
    std::shuffle(members.begin(), members.end(), rng);
    dealt.insert(dealt.end(), members.begin(), members.end());
  }
  std::size_t offset = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
  for (std::size_t p = 0; p < dealt.size(); ++p) {
    switch ((p + offset) % 3) {
      case 0: split.weight.push_back(dealt[p]); break;
      case 1: split.train.push_back(dealt[p]); break;
      default: split.pred.push_back(dealt[p]); break;
    }
  }
  if (scheme == Scheme::exponential) {
    split.train.insert(split.train.end(), split.weight.begin(), split.weight.end());
    split.weight.clear();
  }
  std::sort(split.weight.begin(), split.weight.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.pred.begin(), split.pred.end());
  return split;
}

namespace {

std::vector<ClassId> argmax_rows(const std::vector<double>& sums, std::span<const std::size_t> sizes,
                                 std::size_t rows) {
  const std::size_t K = sizes.size();
  std::vector<ClassId> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    ClassId best = 0;
    double best_mean = sums[r * K] / static_cast<double>(sizes[0]);
    for (std::size_t k = 1; k < K; ++k) {
      double mean = sums[r * K + k] / static_cast<double>(sizes[k]);
      if (mean > best_mean) {
        best_mean = mean;
        best = static_cast<ClassId>(k);
      }
    }
    out[r] = best;
  }
  return out;
}

std::vector<std::size_t> class_sizes(std::span<const ClassId> column_classes) {
  ClassId top = -1;
  for (ClassId c : column_classes) {
    if (c < 0) throw std::invalid_argument("training column without a class");
    top = std::max(top, c);
  }
  if (top < 0) throw std::invalid_argument("no training columns");
  std::vector<std::size_t> sizes(static_cast<std::size_t>(top) + 1, 0);
  for (ClassId c : column_classes) ++sizes[c];
  for (std::size_t k = 0; k < sizes.size(); ++k)
    if (sizes[k] == 0) throw std::invalid_argument("class " + std::to_string(k) + " has no training column");
  return sizes;
}

}  // namespace

std::vector<ClassId> mean_similarity_classify(const GramMatrix& pred, std::span<const ClassId> column_classes) {
  if (column_classes.size() != pred.cols.size()) throw std::invalid_argument("one class per Gram column expected");
  auto sizes = class_sizes(column_classes);
  const std::size_t K = sizes.size();
  std::vector<double> sums(pred.rows.size() * K, 0.0);
  for (std::size_t r = 0; r < pred.rows.size(); ++r)
    for (std::size_t c = 0; c < pred.cols.size(); ++c) sums[r * K + column_classes[c]] += pred.at(r, c);
  return argmax_rows(sums, sizes, pred.rows.size());
}

std::vector<ClassId> centroid_classify(const AnnotatedDag& annotated, std::span<const double> weights,
                                       std::span<const MemberId> rows, std::span<const MemberId> train,
                                       std::span<const ClassId> classes) {
  if (weights.size() != annotated.dag().size()) throw std::invalid_argument("weight table size differs from DAG size");
  std::vector<ClassId> train_classes;
  for (MemberId j : train) train_classes.push_back(classes[j]);
  auto sizes = class_sizes(train_classes);
  const std::size_t K = sizes.size();
  const Dag& dag = annotated.dag();
  // Per vertex and class: total frequency over the class's training members.
  std::vector<double> mass(dag.size() * K, 0.0);
  // A member listed several times counts that many times.
  std::vector<std::uint64_t> in_train(annotated.member_count(), 0);
  for (MemberId j : train) ++in_train.at(j);
  for (VertexId v = 0; v < dag.size(); ++v)
    for (const FreqEntry& f : annotated.frequency(v))
      if (in_train[f.member])
        mass[v * K + classes[f.member]] += static_cast<double>(f.count) * static_cast<double>(in_train[f.member]);

  std::vector<double> sums(rows.size() * K, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (VertexId v : annotated.matching().member_vertices(rows[r])) {
      double own = weights[v] * static_cast<double>(annotated.count(v, rows[r]));
      if (own == 0.0) continue;
      for (std::size_t k = 0; k < K; ++k) sums[r * K + k] += own * mass[v * K + k];
    }
  return argmax_rows(sums, sizes, rows.size());
}

MetricsReport evaluate(std::span<const ClassId> predicted, std::span<const ClassId> truth, std::size_t K) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("prediction and truth differ in length");
  if (K == 0) throw std::invalid_argument("no classes");
  MetricsReport m;
  m.per_class.assign(K, {});
  auto check = [K](ClassId c) {
    if (c < 0 || static_cast<std::size_t>(c) >= K) throw std::invalid_argument("class label out of range");
  };
  for (std::size_t s = 0; s < truth.size(); ++s) {
    check(predicted[s]);
    check(truth[s]);
    for (std::size_t k = 0; k < K; ++k) {
      bool p = static_cast<std::size_t>(predicted[s]) == k;
      bool t = static_cast<std::size_t>(truth[s]) == k;
      auto& c = m.per_class[k];
      if (p && t) ++c.tp;
      else if (p) ++c.fp;
      else if (t) ++c.fn;
      else ++c.tn;
    }
  }
  auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  std::size_t correct = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const auto& c = m.per_class[k];
    correct += c.tp;
    double p = ratio(c.tp, c.tp + c.fp);
    double r = ratio(c.tp, c.tp + c.fn);
    m.precision += p;
    m.recall += r;
    m.f_score += p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
  m.precision /= static_cast<double>(K);
  m.recall /= static_cast<double>(K);
  m.f_score /= static_cast<double>(K);
  m.accuracy = ratio(correct, truth.size());
  return m;
}

double relative_improvement(double discr, std::span<const double> lambda_metrics) {
  if (lambda_metrics.empty()) throw std::invalid_argument("no lambda metrics");
  double best = *std::max_element(lambda_metrics.begin(), lambda_metrics.end());
  if (best <= 0.0) throw std::invalid_argument("best lambda metric is not positive");
  return (discr - best) / best;
}

double ExperimentResult::mean_f_score() const {
  double s = 0.0;
  for (const auto& r : reports) s += r.f_score;
  return reports.empty() ? 0.0 : s / static_cast<double>(reports.size());
}

double ExperimentResult::mean_accuracy() const {
  double s = 0.0;
  for (const auto& r : reports) s += r.accuracy;
  return reports.empty() ? 0.0 : s / static_cast<double>(reports.size());
}

ExperimentResult run_experiment(const AnnotatedDag& annotated, std::span<const ClassId> classes,
                                const ExperimentConfig& config) {
  if (classes.size() != annotated.member_count()) throw ConfigError("class table size differs from dataset size");
  std::size_t K = 0;
  for (ClassId c : classes) {
    if (c == kNoClass) throw ConfigError("every member needs a class to run an experiment");
    K = std::max(K, static_cast<std::size_t>(c) + 1);
  }
  if (K < 2) throw ConfigError("an experiment needs at least two classes");

  ExperimentResult result;
  KernelEngine engine(annotated);
  std::vector<double> exp_weights;
  if (config.scheme == Scheme::exponential) exp_weights = exponential_weights(annotated.dag(), config.lambda);

  for (std::size_t rep = 0; rep < config.repeats; ++rep) {
    Split split = split_thirds(classes, config.seed + rep, config.scheme, &result.warnings);
    if (config.scheme == Scheme::discriminance) {
      ClassProfile profile = class_profile(annotated, classes, split.weight);
      engine.reweight(discriminance_weights(profile, config.shaping));
    } else {
      engine.reweight(exp_weights);
    }
    GramMatrix pred = engine.gram(split.pred, split.train, config.threads);
    std::vector<ClassId> column_classes;
    for (MemberId j : split.train) column_classes.push_back(classes[j]);
    auto predicted = mean_similarity_classify(pred, column_classes);
    std::vector<ClassId> truth;
    for (MemberId i : split.pred) truth.push_back(classes[i]);
    result.reports.push_back(evaluate(predicted, truth, K));
    if (config.keep_train_grams) result.train_grams.push_back(engine.gram(split.train, split.train, config.threads));
  }
  return result;
}

ExperimentResult run_experiment(const Dataset& data, const ExperimentConfig& config) {
  if (data.size() < 3) throw ConfigError("an experiment needs at least 3 trees");
  AnnotatedDag annotated = annotate(data.trees, data.mode);
  return run_experiment(annotated, data.classes, config);
}

}  // namespace stk
