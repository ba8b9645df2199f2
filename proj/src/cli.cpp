#include "subtree_kernel/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "subtree_kernel/errors.hpp"
#include "subtree_kernel/markup.hpp"
#include "subtree_kernel/theory.hpp"
#include "subtree_kernel/viz.hpp"

namespace stk {

namespace {

struct RunConfig {
  std::string mode = "unordered";
  bool labeled = false;
  std::string weight = "exp";
  double lambda = 0.5;
  std::string shaping = "smooth";
  double eps = 0.3;
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  std::string out;

  TreeMode tree_mode() const { return TreeMode{mode == "ordered" ? Order::ordered : Order::unordered, labeled}; }
};

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--mode", cfg.mode, "tree isomorphism")->check(CLI::IsMember({"ordered", "unordered"}));
  cmd->add_flag("--labeled", cfg.labeled, "compare vertex labels");
  cmd->add_option("--weight", cfg.weight, "weight scheme")->check(CLI::IsMember({"exp", "discr"}));
  cmd->add_option("--lambda", cfg.lambda, "exponential decay");
  cmd->add_option("--shaping", cfg.shaping, "discriminance shaping")
      ->check(CLI::IsMember({"id", "smooth", "smooth2", "thresh"}));
  cmd->add_option("--eps", cfg.eps, "threshold of the thresh shaping");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--repeats", cfg.repeats, "number of repeats");
  cmd->add_option("--out", cfg.out, "output path");
}

void validate(const RunConfig& cfg) {
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) throw ConfigError("--lambda must lie in [0, 1]");
  if (!(cfg.eps >= 0.0 && cfg.eps < 1.0)) throw ConfigError("--eps must lie in [0, 1)");
  if (cfg.repeats == 0) throw ConfigError("--repeats must be positive");
}

std::string read_input(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read '" + path + "'");
  buf << f.rdbuf();
  return buf.str();
}

Dataset load(const std::string& path, const RunConfig& cfg) {
  std::filesystem::path base = path == "-" ? std::filesystem::path{} : std::filesystem::path(path).parent_path();
  Dataset data = read_manifest(read_input(path), cfg.tree_mode(), base);
  if (data.size() == 0) throw ConfigError("'" + path + "' holds no tree");
  return data;
}

// Writes to --out when given, otherwise to `fallback`.
void emit(const RunConfig& cfg, const std::string& text, std::ostream& fallback) {
  if (cfg.out.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + cfg.out + "'");
  f << text;
}

bool has_roles(const Dataset& data) {
  return std::any_of(data.roles.begin(), data.roles.end(), [](Role r) { return r != Role::none; });
}

Split split_from_roles(const Dataset& data) {
  Split s;
  for (MemberId i = 0; i < data.size(); ++i) {
    switch (data.roles[i]) {
      case Role::weight: s.weight.push_back(i); break;
      case Role::train: s.train.push_back(i); break;
      case Role::pred: s.pred.push_back(i); break;
      case Role::none: break;
    }
  }
  return s;
}

Split dataset_split(const Dataset& data, const RunConfig& cfg, Scheme scheme, std::ostream& err) {
  Split s;
  if (has_roles(data)) {
    s = split_from_roles(data);
    if (scheme == Scheme::exponential) {
      s.train.insert(s.train.end(), s.weight.begin(), s.weight.end());
      std::sort(s.train.begin(), s.train.end());
      s.weight.clear();
    }
  } else {
    std::vector<std::string> warnings;
    s = split_thirds(data.classes, cfg.seed, scheme, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
  }
  return s;
}

Scheme scheme_of(const RunConfig& cfg) { return cfg.weight == "discr" ? Scheme::discriminance : Scheme::exponential; }

// Members used to learn discriminance weights: the weight role when roles
// are present, otherwise every member with a class.
std::vector<MemberId> profile_members(const Dataset& data) {
  std::vector<MemberId> out;
  bool roles = has_roles(data);
  for (MemberId i = 0; i < data.size(); ++i) {
    if (roles ? data.roles[i] == Role::weight : data.classes[i] != kNoClass) out.push_back(i);
  }
  return out;
}

ClassProfile learn_profile(const AnnotatedDag& annotated, const Dataset& data, std::span<const MemberId> members) {
  if (members.empty()) throw ConfigError("discriminance weights need members with a class");
  for (MemberId i : members)
    if (data.classes[i] == kNoClass) throw ConfigError("weight-training member " + std::to_string(i) + " has no class");
  try {
    return class_profile(annotated, data.classes, members);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<double> weights_for(const AnnotatedDag& annotated, const Dataset& data, const RunConfig& cfg,
                                std::span<const MemberId> weight_members) {
  if (scheme_of(cfg) == Scheme::exponential) return exponential_weights(annotated.dag(), cfg.lambda);
  ClassProfile profile = learn_profile(annotated, data, weight_members);
  return discriminance_weights(profile, parse_shaping(cfg.shaping, cfg.eps));
}

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos)
      return Rational(std::stoll(text.substr(0, slash))) / Rational(std::stoll(text.substr(slash + 1)));
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(std::stoll(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    boost::multiprecision::cpp_int den = 1;
    for (std::size_t k = dot + 1; k < text.size(); ++k) den *= 10;
    return Rational(boost::multiprecision::cpp_int(digits)) / Rational(den);
  } catch (const std::exception&) {
    throw ConfigError("cannot read '" + text + "' as a number");
  }
}

std::string fixed(double x, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

int cmd_reduce(const std::string& input, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Dataset data = load(input, cfg);
  std::size_t before = 0;
  for (const Tree& t : data.trees) before += t.size();
  Dag dag = data.size() == 1 ? reduce(data.trees.front(), data.mode) : reduce_forest(data.trees, data.mode);
  std::size_t after = dag.class_count();
  std::ostringstream stats;
  stats << "trees: " << data.size() << "\nvertices: " << before << " -> " << after
        << "\ncompression: " << fixed(static_cast<double>(before) / static_cast<double>(after), 2) << '\n';
  emit(cfg, write_dag_text(dag, data.mode.labeled ? &data.alphabet : nullptr), out);
  (cfg.out.empty() ? err : out) << stats.str();
  return kExitOk;
}

int cmd_annotate(const std::string& input, const RunConfig& cfg, std::ostream& out) {
  Dataset data = load(input, cfg);
  AnnotatedDag annotated = annotate(data.trees, data.mode);
  std::size_t lo = SIZE_MAX, hi = 0, total = 0, counted = 0;
  for (VertexId v = 0; v < annotated.dag().size(); ++v) {
    if (annotated.dag().has_artificial_root() && v == annotated.dag().root()) continue;
    std::size_t n = annotated.origins(v).size();
    lo = std::min(lo, n);
    hi = std::max(hi, n);
    total += n;
    ++counted;
  }
  std::ostringstream s;
  s << "members: " << annotated.member_count() << "\ndag vertices: " << annotated.dag().class_count()
    << "\nheight: " << annotated.dag().height() - (annotated.dag().has_artificial_root() ? 1 : 0) << "\norigin size: min " << lo << ", mean "
    << fixed(static_cast<double>(total) / static_cast<double>(counted), 2) << ", max " << hi
    << "\ntraversals: origins " << annotated.counters().origins << ", frequencies " << annotated.counters().frequencies
    << ", matching " << annotated.counters().matching << '\n';
  emit(cfg, s.str(), out);
  return kExitOk;
}

int cmd_gram(const std::string& input, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Dataset data = load(input, cfg);
  Scheme scheme = scheme_of(cfg);
  if (scheme == Scheme::discriminance && std::all_of(data.classes.begin(), data.classes.end(),
                                                      [](ClassId c) { return c == kNoClass; }))
    throw ConfigError("discriminance weights need a class column");
  AnnotatedDag annotated = annotate(data.trees, data.mode);
  Split split = dataset_split(data, cfg, scheme, err);
  KernelEngine engine(annotated, weights_for(annotated, data, cfg, split.weight));
  GramMatrix train = engine.gram(split.train, split.train);
  GramMatrix pred = engine.gram(split.pred, split.train);
  if (cfg.out.empty()) {
    out << "# train\n" << gram_csv(train) << "# pred\n" << gram_csv(pred);
  } else {
    RunConfig a = cfg, b = cfg;
    a.out = cfg.out + ".train.csv";
    b.out = cfg.out + ".pred.csv";
    emit(a, gram_csv(train), out);
    emit(b, gram_csv(pred), out);
  }
  return kExitOk;
}

int cmd_classify(const std::string& input, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Dataset data = load(input, cfg);
  Scheme scheme = scheme_of(cfg);
  for (MemberId i = 0; i < data.size(); ++i)
    if (data.classes[i] == kNoClass && data.roles[i] != Role::pred)
      throw ConfigError("tree " + std::to_string(i) + " has no class");
  if (data.class_count() < 2) throw ConfigError("classification needs at least two classes");
  AnnotatedDag annotated = annotate(data.trees, data.mode);
  KernelEngine engine(annotated);

  std::ostringstream csv;
  csv << "repeat,accuracy,precision,recall,f_score\n";
  double sums[4] = {0, 0, 0, 0};
  std::size_t runs = has_roles(data) ? 1 : cfg.repeats;
  for (std::size_t rep = 0; rep < runs; ++rep) {
    RunConfig c = cfg;
    c.seed = cfg.seed + rep;
    Split split = dataset_split(data, c, scheme, err);
    engine.reweight(weights_for(annotated, data, c, split.weight));
    std::vector<ClassId> column_classes, truth;
    for (MemberId j : split.train) column_classes.push_back(data.classes[j]);
    std::vector<MemberId> scored;
    for (MemberId i : split.pred)
      if (data.classes[i] != kNoClass) scored.push_back(i);
    for (MemberId i : scored) truth.push_back(data.classes[i]);
    GramMatrix pred = engine.gram(scored, split.train);
    MetricsReport m;
    try {
      m = evaluate(mean_similarity_classify(pred, column_classes), truth, data.class_count());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    csv << rep << ',' << fixed(m.accuracy, 6) << ',' << fixed(m.precision, 6) << ',' << fixed(m.recall, 6) << ','
        << fixed(m.f_score, 6) << '\n';
    sums[0] += m.accuracy;
    sums[1] += m.precision;
    sums[2] += m.recall;
    sums[3] += m.f_score;
  }
  double n = static_cast<double>(runs);
  std::ostringstream table;
  table << "scheme " << (scheme == Scheme::exponential ? "exp lambda=" + fixed(cfg.lambda, 2) : "discr " + cfg.shaping)
        << ", repeats " << runs << "\naccuracy  " << fixed(sums[0] / n) << "\nprecision " << fixed(sums[1] / n)
        << "\nrecall    " << fixed(sums[2] / n) << "\nf-score   " << fixed(sums[3] / n) << '\n';
  if (cfg.out.empty()) {
    out << csv.str() << table.str();
  } else {
    emit(cfg, csv.str(), out);
    out << table.str();
  }
  return kExitOk;
}

struct SimulateOptions {
  std::uint32_t height = 3;
  std::string rho = "2";
  std::uint32_t h = 0;
  double delta = 0.1;
  std::string leaf_weight = "1";
};

int cmd_simulate(const SimulateOptions& so, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.labeled) throw ConfigError("the model uses unlabeled trees");
  if (so.height < 2) throw ConfigError("--height must be at least 2");
  Rational rho = parse_rational(so.rho);
  if (rho < 0 || rho > so.height) throw ConfigError("--rho must lie in [0, height]");
  if (so.h >= so.height) throw ConfigError("--h must be below --height");
  if (!(so.delta > 0.0 && so.delta < 1.0)) throw ConfigError("--delta must lie in (0, 1)");
  Rational leaf = parse_rational(so.leaf_weight);
  if (leaf <= 0) throw ConfigError("--leaf-weight must be positive");

  ModelInstance model = build_model(so.height, rho, cfg.seed, cfg.tree_mode());
  EditSpace space(model);
  HeightWeights w = unit_weights(model.H);
  Prop1Report p1 = check_prop1(space, w, so.h);
  Prop2Report p2 = check_prop2(space, w, leaf);

  std::ostringstream csv;
  csv << "tree,x,height,delta,bound,status\n";
  for (const Prop1Row& r : p1.rows) {
    std::string status = r.height > so.h ? "-" : !r.asserted ? "not asserted" : r.pass ? "pass" : "fail";
    csv << r.tree << ',' << r.x << ',' << r.height << ',' << std::setprecision(17) << to_double(r.delta) << ','
        << to_double(r.bound) << ',' << status << '\n';
  }
  std::ostringstream summary;
  summary << "model: H=" << model.H << " rho=" << so.rho << " sizes " << model.trees[0].size() << ", "
          << model.trees[1].size() << "\nG(h): " << to_double(p1.G) << "\ncontrast zero iff root: "
          << (p1.zero_iff_root ? "pass" : "fail") << "\ncontrast bound: "
          << (!p1.asserted ? "not asserted" : (p1.pass[0] && p1.pass[1]) ? "pass" : "fail")
          << "\nleaf weight stated identity: " << (p2.literal_identity ? "pass" : "fail")
          << "\nleaf weight edited-tree identity: " << (p2.edited_identity ? "pass" : "fail")
          << "\nleaf weight some class not increased: " << (p2.some_class_not_increased ? "pass" : "fail") << '\n';
  summary << "log(2/delta): " << std::log(2.0 / so.delta) << '\n';
  try {
    summary << "sufficient size: " << sufficient_size(model, w, so.h, so.delta) << '\n';
  } catch (const DegenerateBoundError& e) {
    summary << "sufficient size: undefined (" << e.what() << ")\n";
  }
  emit(cfg, csv.str(), out);
  (cfg.out.empty() ? err : out) << summary.str();
  return kExitOk;
}

int cmd_ingest(const std::vector<std::string>& files, const std::string& cls, const RunConfig& cfg,
               std::ostream& out) {
  Dataset data;
  data.mode = TreeMode{Order::ordered, cfg.labeled};
  ClassId c = cls.empty() ? kNoClass : data.class_id(cls);
  std::vector<std::string> inputs = files.empty() ? std::vector<std::string>{"-"} : files;
  for (const auto& f : inputs) {
    std::string text;
    try {
      text = read_input(f);
    } catch (const ConfigError&) {
      throw;
    }
    try {
      data.add(markup_to_tree(text, cfg.labeled, data.alphabet), c);
    } catch (const ParseError& e) {
      throw ParseError(f + ": " + e.what(), 0, 0);
    }
  }
  emit(cfg, write_manifest(data), out);
  return kExitOk;
}

int cmd_generate(const CorpusOptions& options, const std::string& docs, const RunConfig& cfg, std::ostream& out) {
  CorpusOptions o = options;
  o.seed = cfg.seed;
  Corpus corpus = [&] {
    try {
      return generate_template_corpus(o);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  if (!docs.empty()) {
    std::filesystem::create_directories(docs);
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
      std::ofstream f(std::filesystem::path(docs) / ("doc" + std::to_string(i) + ".html"));
      f << corpus.documents[i];
    }
  }
  emit(cfg, write_manifest(corpus.data), out);
  return kExitOk;
}

int cmd_viz(const std::string& input, double min_width, const RunConfig& cfg, std::ostream& out) {
  if (scheme_of(cfg) == Scheme::exponential) throw ConfigError("viz needs discriminance weights (--weight discr)");
  Dataset data = load(input, cfg);
  AnnotatedDag annotated = annotate(data.trees, data.mode);
  ClassProfile profile = learn_profile(annotated, data, profile_members(data));
  auto w = discriminance_weights(profile, parse_shaping(cfg.shaping, cfg.eps));
  DotOptions o;
  o.min_width = min_width;
  o.alphabet = data.mode.labeled ? &data.alphabet : nullptr;
  emit(cfg, dag_to_dot(annotated.dag(), w, profile, o), out);
  return kExitOk;
}

int cmd_weights_hist(const std::string& input, const std::string& table, const RunConfig& cfg, std::ostream& out) {
  Dataset data = load(input, cfg);
  AnnotatedDag annotated = annotate(data.trees, data.mode);
  std::vector<double> w;
  ClassProfile profile;
  bool discr = scheme_of(cfg) == Scheme::discriminance;
  if (discr) {
    profile = learn_profile(annotated, data, profile_members(data));
    w = discriminance_weights(profile, parse_shaping(cfg.shaping, cfg.eps));
  } else {
    w = exponential_weights(annotated.dag(), cfg.lambda);
  }
  if (!table.empty()) {
    std::ofstream f(table);
    if (!f) throw ConfigError("cannot write '" + table + "'");
    f << weight_table_csv(annotated.dag(), w, discr ? &profile : nullptr);
  }
  emit(cfg, weight_histogram_csv(weight_histogram(annotated.dag(), w)), out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subtree kernels through DAG reduction"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string input = "-";
  std::vector<std::string> files;
  std::string cls, docs, table;
  double min_width = 0.1;
  SimulateOptions so;
  CorpusOptions co;

  auto* reduce_cmd = app.add_subcommand("reduce", "DAG reduction of a tree or forest");
  auto* annotate_cmd = app.add_subcommand("annotate", "annotation summary of a dataset");
  auto* gram_cmd = app.add_subcommand("gram", "train and prediction Gram matrices");
  auto* classify_cmd = app.add_subcommand("classify", "mean-similarity classification over random splits");
  auto* viz_cmd = app.add_subcommand("viz", "DOT drawing of a discriminance-weighted DAG");
  auto* hist_cmd = app.add_subcommand("weights-hist", "weight distribution per height");
  for (auto* c : {reduce_cmd, annotate_cmd, gram_cmd, classify_cmd, viz_cmd, hist_cmd}) {
    add_common(c, cfg);
    c->add_option("input", input, "manifest file, - for stdin");
  }
  viz_cmd->add_option("--min-width", min_width, "node width of a zero weight");
  hist_cmd->add_option("--table", table, "also write the per-vertex weight table");

  auto* simulate_cmd = app.add_subcommand("simulate", "checks on the two-class random tree model");
  add_common(simulate_cmd, cfg);
  simulate_cmd->set_help_flag("--help", "Print this help message and exit");
  simulate_cmd->add_option("--height", so.height, "model height H");
  simulate_cmd->add_option("--rho", so.rho, "mean edited height, e.g. 5/2");
  simulate_cmd->add_option("--h", so.h, "height threshold of the bound");
  simulate_cmd->add_option("--delta", so.delta, "confidence parameter");
  simulate_cmd->add_option("--leaf-weight", so.leaf_weight, "leaf weight of the second kernel");

  auto* ingest_cmd = app.add_subcommand("ingest", "markup documents to a manifest");
  add_common(ingest_cmd, cfg);
  ingest_cmd->add_option("files", files, "markup files, stdin when absent");
  ingest_cmd->add_option("--class", cls, "class of every document");

  auto* generate_cmd = app.add_subcommand("generate", "synthetic two-template markup corpus");
  add_common(generate_cmd, cfg);
  generate_cmd->add_option("--per-class", co.per_class, "documents per template");
  generate_cmd->add_option("--edit-rate", co.edit_rate, "edit rate in [0, 1]");
  generate_cmd->add_option("--height", co.height, "template height");
  generate_cmd->add_option("--docs", docs, "directory for the markup documents");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    validate(cfg);
    if (reduce_cmd->parsed()) return cmd_reduce(input, cfg, out, err);
    if (annotate_cmd->parsed()) return cmd_annotate(input, cfg, out);
    if (gram_cmd->parsed()) return cmd_gram(input, cfg, out, err);
    if (classify_cmd->parsed()) return cmd_classify(input, cfg, out, err);
    if (viz_cmd->parsed()) return cmd_viz(input, min_width, cfg, out);
    if (hist_cmd->parsed()) return cmd_weights_hist(input, table, cfg, out);
    if (simulate_cmd->parsed()) return cmd_simulate(so, cfg, out, err);
    if (ingest_cmd->parsed()) return cmd_ingest(files, cls, cfg, out);
    if (generate_cmd->parsed()) return cmd_generate(co, docs, cfg, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace stk
