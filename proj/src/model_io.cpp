#include "edrisk/model_io.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "edrisk/util.hpp"

namespace edrisk {

namespace {

namespace fs = std::filesystem;

constexpr const char* kManifestName = "manifest.txt";

class LineParser {
 public:
  LineParser(const std::string& text, std::string context)
      : lines_(split(text, '\n')), context_(std::move(context)) {}

  std::string next() {
    while (pos_ < lines_.size()) {
      std::string line = lines_[pos_++];
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    throw Error(context_ + ": truncated");
  }

  // "key rest-of-line"
  std::string expect(const std::string& key) {
    const std::string line = next();
    if (line == key) return {};
    if (line.rfind(key + " ", 0) != 0) throw Error(context_ + ": expected '" + key + "', got '" + line + "'");
    return line.substr(key.size() + 1);
  }

  long long expect_int(const std::string& key) {
    auto v = parse_int(expect(key));
    if (!v) throw Error(context_ + ": bad integer for " + key);
    return *v;
  }

  double expect_double(const std::string& key) {
    auto v = parse_double(expect(key));
    if (!v) throw Error(context_ + ": bad number for " + key);
    return *v;
  }

 private:
  std::vector<std::string> lines_;
  std::size_t pos_ = 0;
  std::string context_;
};

}  // namespace

std::string logistic_to_text(const LogisticModel& model, const std::string& kind) {
  std::ostringstream ss;
  ss << kind << " 1\n";
  ss << "dimension " << model.dimension << '\n';
  ss << "l2 " << fmt_double(model.hyper.l2) << '\n';
  ss << "learning_rate " << fmt_double(model.hyper.learning_rate) << '\n';
  ss << "max_epochs " << model.hyper.max_epochs << '\n';
  ss << "tolerance " << fmt_double(model.hyper.tolerance) << '\n';
  ss << "final_loss " << fmt_double(model.final_loss) << '\n';
  ss << "epochs_run " << model.epochs_run << '\n';
  ss << "intercept " << fmt_double(model.intercept) << '\n';
  std::size_t nonzero = 0;
  for (double w : model.weights)
    if (w != 0.0) ++nonzero;
  ss << "weights " << nonzero << '\n';
  for (std::uint32_t j = 0; j < model.weights.size(); ++j)
    if (model.weights[j] != 0.0) ss << j << ' ' << fmt_double(model.weights[j]) << '\n';
  return ss.str();
}

LogisticModel logistic_from_text(const std::string& text, const std::string& kind) {
  LineParser p(text, kind + " file");
  const std::string version = p.expect(kind);
  if (version != "1") throw Error(kind + " file: unsupported version '" + version + "'");
  LogisticModel model;
  model.dimension = static_cast<std::uint32_t>(p.expect_int("dimension"));
  model.hyper.l2 = p.expect_double("l2");
  model.hyper.learning_rate = p.expect_double("learning_rate");
  model.hyper.max_epochs = static_cast<int>(p.expect_int("max_epochs"));
  model.hyper.tolerance = p.expect_double("tolerance");
  model.final_loss = p.expect_double("final_loss");
  model.epochs_run = static_cast<int>(p.expect_int("epochs_run"));
  model.intercept = p.expect_double("intercept");
  const long long n = p.expect_int("weights");
  model.weights.assign(model.dimension, 0.0);
  for (long long i = 0; i < n; ++i) {
    const std::string line = p.next();
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos) throw Error(kind + " file: bad weight line: " + line);
    const auto idx = parse_int(line.substr(0, sp));
    const auto w = parse_double(line.substr(sp + 1));
    if (!idx || !w || *idx < 0 || *idx >= model.dimension)
      throw Error(kind + " file: bad weight line: " + line);
    model.weights[static_cast<std::size_t>(*idx)] = *w;
  }
  return model;
}

std::string naive_bayes_to_text(const NaiveBayesModel& model) {
  std::ostringstream ss;
  ss << "naive_bayes 1\n";
  ss << "dimension " << model.dimension << '\n';
  ss << "alpha " << fmt_double(model.alpha) << '\n';
  ss << "log_prior " << fmt_double(model.log_prior[0]) << ' ' << fmt_double(model.log_prior[1])
     << '\n';
  ss << "conditionals " << model.dimension << '\n';
  for (std::uint32_t j = 0; j < model.dimension; ++j)
    ss << j << ' ' << fmt_double(model.log_present[0][j]) << ' '
       << fmt_double(model.log_absent[0][j]) << ' ' << fmt_double(model.log_present[1][j]) << ' '
       << fmt_double(model.log_absent[1][j]) << '\n';
  return ss.str();
}

NaiveBayesModel naive_bayes_from_text(const std::string& text) {
  LineParser p(text, "naive_bayes file");
  if (p.expect("naive_bayes") != "1") throw Error("naive_bayes file: unsupported version");
  NaiveBayesModel model;
  model.dimension = static_cast<std::uint32_t>(p.expect_int("dimension"));
  model.alpha = p.expect_double("alpha");
  const std::vector<std::string> prior = split(p.expect("log_prior"), ' ');
  if (prior.size() != 2) throw Error("naive_bayes file: bad log_prior");
  model.log_prior[0] = parse_double(prior[0]).value_or(std::nan(""));
  model.log_prior[1] = parse_double(prior[1]).value_or(std::nan(""));
  const long long n = p.expect_int("conditionals");
  if (n != static_cast<long long>(model.dimension))
    throw Error("naive_bayes file: conditional count mismatch");
  for (int c = 0; c < 2; ++c) {
    model.log_present[static_cast<std::size_t>(c)].assign(model.dimension, 0.0);
    model.log_absent[static_cast<std::size_t>(c)].assign(model.dimension, 0.0);
  }
  for (long long i = 0; i < n; ++i) {
    const std::vector<std::string> parts = split(p.next(), ' ');
    if (parts.size() != 5) throw Error("naive_bayes file: bad conditional line");
    const auto idx = parse_int(parts[0]);
    if (!idx || *idx != i) throw Error("naive_bayes file: conditional index out of order");
    const std::size_t j = static_cast<std::size_t>(i);
    model.log_present[0][j] = parse_double(parts[1]).value_or(std::nan(""));
    model.log_absent[0][j] = parse_double(parts[2]).value_or(std::nan(""));
    model.log_present[1][j] = parse_double(parts[3]).value_or(std::nan(""));
    model.log_absent[1][j] = parse_double(parts[4]).value_or(std::nan(""));
  }
  // Rebuild the cached totals in the same index order used by fitting.
  for (int c = 0; c < 2; ++c) {
    const std::size_t ci = static_cast<std::size_t>(c);
    double total = 0.0;
    for (std::uint32_t j = 0; j < model.dimension; ++j) total += model.log_absent[ci][j];
    model.sum_log_absent[ci] = total;
  }
  return model;
}

std::string ruleset_to_text(const RuleSet& rules) {
  std::ostringstream ss;
  ss << "ruleset 1\n";
  ss << "view " << (rules.view() == ItemsetView::longitudinal ? "longitudinal" : "horizontal")
     << '\n';
  ss << "min_support " << rules.min_support() << '\n';
  ss << "max_antecedent_len "
     << (rules.max_antecedent_len() ? std::to_string(*rules.max_antecedent_len()) : "none") << '\n';
  ss << "tie_break "
     << (rules.tie_break() == TieBreak::lexicographic ? "lexicographic" : "confidence") << '\n';
  ss << "prior " << fmt_double(rules.class_prior()[0]) << ' ' << fmt_double(rules.class_prior()[1])
     << '\n';
  ss << "rules " << rules.rules().size() << '\n';
  for (const Rule& r : rules.rules())
    ss << itemset_to_string(r.antecedent) << ' ' << r.support << ' ' << fmt_double(r.confidence[0])
       << ' ' << fmt_double(r.confidence[1]) << '\n';
  return ss.str();
}

RuleSet ruleset_from_text(const std::string& text) {
  LineParser p(text, "ruleset file");
  if (p.expect("ruleset") != "1") throw Error("ruleset file: unsupported version");
  const std::string view_s = p.expect("view");
  ItemsetView view;
  if (view_s == "longitudinal")
    view = ItemsetView::longitudinal;
  else if (view_s == "horizontal")
    view = ItemsetView::horizontal;
  else
    throw Error("ruleset file: bad view");
  const std::uint32_t min_support = static_cast<std::uint32_t>(p.expect_int("min_support"));
  const std::string max_len_s = p.expect("max_antecedent_len");
  std::optional<int> max_len;
  if (max_len_s != "none") {
    auto v = parse_int(max_len_s);
    if (!v) throw Error("ruleset file: bad max_antecedent_len");
    max_len = static_cast<int>(*v);
  }
  const std::string tie_s = p.expect("tie_break");
  TieBreak tie_break;
  if (tie_s == "lexicographic")
    tie_break = TieBreak::lexicographic;
  else if (tie_s == "confidence")
    tie_break = TieBreak::confidence;
  else
    throw Error("ruleset file: bad tie_break");
  const std::vector<std::string> prior_s = split(p.expect("prior"), ' ');
  if (prior_s.size() != 2) throw Error("ruleset file: bad prior");
  std::array<double, 2> prior{parse_double(prior_s[0]).value_or(std::nan("")),
                              parse_double(prior_s[1]).value_or(std::nan(""))};
  const long long n = p.expect_int("rules");
  std::vector<Rule> rules;
  rules.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const std::vector<std::string> parts = split(p.next(), ' ');
    if (parts.size() != 4) throw Error("ruleset file: bad rule line");
    Rule r;
    r.antecedent = itemset_from_string(parts[0]);
    const auto support = parse_int(parts[1]);
    const auto c0 = parse_double(parts[2]);
    const auto c1 = parse_double(parts[3]);
    if (!support || *support < 1 || !c0 || !c1) throw Error("ruleset file: bad rule line");
    r.support = static_cast<std::uint32_t>(*support);
    r.confidence = {*c0, *c1};
    r.positives = static_cast<std::uint32_t>(std::llround(*c1 * static_cast<double>(r.support)));
    rules.push_back(std::move(r));
  }
  return RuleSet(std::move(rules), min_support, prior, view, max_len, tie_break);
}

void save_model_bundle(const EnsembleModel& model, const std::vector<LeakageFlag>& audit,
                       const std::string& dir) {
  fs::create_directories(dir);
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("vocabulary.txt", model.vocab.to_text());
  files.emplace_back("logistic.txt", logistic_to_text(model.logistic, "logistic"));
  files.emplace_back("naive_bayes.txt", naive_bayes_to_text(model.nb));
  files.emplace_back("arc1.txt", ruleset_to_text(model.arc1));
  files.emplace_back("arc2.txt", ruleset_to_text(model.arc2));
  files.emplace_back("meta.txt", logistic_to_text(model.meta, "meta"));
  files.emplace_back("leakage_audit.txt", leakage_flags_to_text(audit));

  std::ostringstream manifest;
  manifest << "edrisk_model 1\n";
  manifest << "window_days " << model.window_days << '\n';
  manifest << "split_seed " << model.split_seed << '\n';
  manifest << "split_unit " << (model.split_unit == SplitUnit::record ? "record" : "patient")
           << '\n';
  manifest << "meta_features " << (model.meta_mode == MetaFeatureMode::raw ? "raw" : "log_odds")
           << '\n';
  manifest << "files " << files.size() << '\n';
  for (const auto& [name, content] : files)
    manifest << "digest " << name << ' ' << fnv1a64_hex(content) << '\n';

  for (const auto& [name, content] : files)
    atomic_write_file((fs::path(dir) / name).string(), content);
  atomic_write_file((fs::path(dir) / kManifestName).string(), manifest.str());
}

LoadedBundle load_model_bundle(const std::string& dir) {
  const std::string manifest_text = read_file((fs::path(dir) / kManifestName).string());
  LineParser p(manifest_text, "model manifest");
  const std::string version = p.expect("edrisk_model");
  if (version != "1")
    throw Error("version error: unsupported model format_version '" + version + "'");

  LoadedBundle bundle;
  EnsembleModel& model = bundle.model;
  model.window_days = static_cast<int>(p.expect_int("window_days"));
  model.split_seed = static_cast<std::uint64_t>(p.expect_int("split_seed"));
  const std::string unit = p.expect("split_unit");
  if (unit == "record")
    model.split_unit = SplitUnit::record;
  else if (unit == "patient")
    model.split_unit = SplitUnit::patient;
  else
    throw Error("model manifest: bad split_unit");
  const std::string meta_mode = p.expect("meta_features");
  if (meta_mode == "raw")
    model.meta_mode = MetaFeatureMode::raw;
  else if (meta_mode == "log_odds")
    model.meta_mode = MetaFeatureMode::log_odds;
  else
    throw Error("model manifest: bad meta_features");

  const long long n_files = p.expect_int("files");
  std::map<std::string, std::string> contents;
  for (long long i = 0; i < n_files; ++i) {
    const std::vector<std::string> parts = split(p.expect("digest"), ' ');
    if (parts.size() != 2) throw Error("model manifest: bad digest line");
    const std::string content = read_file((fs::path(dir) / parts[0]).string());
    if (fnv1a64_hex(content) != parts[1])
      throw Error("corruption error: digest mismatch for " + parts[0]);
    contents.emplace(parts[0], content);
  }
  auto want = [&](const char* name) -> const std::string& {
    auto it = contents.find(name);
    if (it == contents.end()) throw Error(std::string("model manifest: missing file ") + name);
    return it->second;
  };

  model.vocab = FeatureVocabulary::from_text(want("vocabulary.txt"));
  model.logistic = logistic_from_text(want("logistic.txt"), "logistic");
  model.nb = naive_bayes_from_text(want("naive_bayes.txt"));
  model.arc1 = ruleset_from_text(want("arc1.txt"));
  model.arc2 = ruleset_from_text(want("arc2.txt"));
  model.meta = logistic_from_text(want("meta.txt"), "meta");
  if (model.meta.dimension != 4) throw Error("model manifest: meta dimension must be 4");
  if (model.logistic.dimension != model.vocab.dimension() ||
      model.nb.dimension != model.vocab.dimension())
    throw Error("model manifest: component dimensions disagree with the vocabulary");
  bundle.audit_text = want("leakage_audit.txt");
  return bundle;
}

}  // namespace edrisk
