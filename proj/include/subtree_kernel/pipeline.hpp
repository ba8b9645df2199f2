#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subtree_kernel/kernel.hpp"
#include "subtree_kernel/weighting.hpp"

namespace stk {

enum class Role { none, weight, train, pred };

struct Dataset {
  TreeMode mode;
  Alphabet alphabet;
  std::vector<Tree> trees;
  std::vector<ClassId> classes;  // kNoClass when unknown
  std::vector<Role> roles;
  // Class names in id order.
  std::vector<std::string> class_names;

  std::size_t size() const { return trees.size(); }
  std::size_t class_count() const { return class_names.size(); }
  // Interns a class name, returning its dense id.
  ClassId class_id(const std::string& name);
  void add(Tree tree, ClassId cls = kNoClass, Role role = Role::none);
};

// Manifest lines: "<bracket tree or @path>\t<class or ->\t<role or ->", '#'
// starts a comment line. Relative @paths resolve against `base_dir`.
Dataset read_manifest(std::string_view text, const TreeMode& mode, const std::filesystem::path& base_dir = {});
std::string write_manifest(const Dataset& data);

struct Split {
  std::vector<MemberId> weight;
  std::vector<MemberId> train;
  std::vector<MemberId> pred;
};

enum class Scheme { exponential, discriminance };

// Stratified random thirds. Under the exponential scheme the weight third is
// merged into the training set. Members without a class go to prediction.
// Classes with fewer than 3 members produce a warning.
Split split_thirds(std::span<const ClassId> classes, std::uint64_t seed, Scheme scheme,
                   std::vector<std::string>* warnings = nullptr);

// Per row, the class with the largest mean kernel value over its columns;
// ties go to the smaller class id. `column_classes[c]` is the class of column c.
std::vector<ClassId> mean_similarity_classify(const GramMatrix& pred, std::span<const ClassId> column_classes);

// Same rule evaluated through per-class mean frequency vectors, without a
// Gram matrix; cost independent of the training set size once annotated.
// `train` may repeat a member, which then weighs as many times.
std::vector<ClassId> centroid_classify(const AnnotatedDag& annotated, std::span<const double> weights,
                                       std::span<const MemberId> rows, std::span<const MemberId> train,
                                       std::span<const ClassId> classes);

struct ClassCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

struct MetricsReport {
  double accuracy = 0, precision = 0, recall = 0, f_score = 0;
  std::vector<ClassCounts> per_class;
};

// Macro averages over K classes; a zero denominator gives 0.
MetricsReport evaluate(std::span<const ClassId> predicted, std::span<const ClassId> truth, std::size_t K);

// (discr - best) / best; throws std::invalid_argument when every lambda metric is 0.
double relative_improvement(double discr, std::span<const double> lambda_metrics);

struct ExperimentConfig {
  Scheme scheme = Scheme::discriminance;
  double lambda = 0.5;
  ShapingFn shaping;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool keep_train_grams = false;
};

struct ExperimentResult {
  std::vector<MetricsReport> reports;
  std::vector<GramMatrix> train_grams;
  std::vector<std::string> warnings;

  double mean_f_score() const;
  double mean_accuracy() const;
};

// Repeats split / weights / Gram / classify / evaluate on a fixed annotation.
ExperimentResult run_experiment(const AnnotatedDag& annotated, std::span<const ClassId> classes,
                                const ExperimentConfig& config);
ExperimentResult run_experiment(const Dataset& data, const ExperimentConfig& config);

}  // namespace stk
