#include "edrisk/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "edrisk/cohort.hpp"
#include "edrisk/csv.hpp"
#include "edrisk/model_io.hpp"
#include "edrisk/util.hpp"

namespace edrisk {

namespace {

namespace fs = std::filesystem;

class StageClock {
 public:
  StageClock(std::ostream& diagnostics) : out_(diagnostics) {}

  template <typename Fn>
  auto run(const std::string& name, Fn&& fn) -> decltype(fn()) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      wrap(name, fn);
      report(name, start);
    } else {
      std::optional<decltype(fn())> result;
      wrap(name, [&] { result.emplace(fn()); });
      report(name, start);
      return std::move(*result);
    }
  }

 private:
  template <typename Fn>
  void wrap(const std::string& name, Fn&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw Error("stage " + name + ": " + e.what());
    }
  }

  void report(const std::string& name, std::chrono::steady_clock::time_point start) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    out_ << "stage " << name << " done in " << ms << " ms\n";
  }

  std::ostream& out_;
};

struct CohortData {
  VisitTable visits;
  ExclusionReport exclusions;
  std::vector<PatientTimeline> timelines;
};

VisitTable obtain_raw_visits(const PipelineConfig& config, const std::string& out_dir,
                             bool write_artifacts, StageClock& clock) {
  if (config.synth) {
    return clock.run("synth", [&] {
      SynthResult result = synthesize(*config.synth);
      if (write_artifacts) {
        atomic_write_file((fs::path(out_dir) / "cohort.csv").string(),
                          visits_to_text(result.visits));
        atomic_write_file((fs::path(out_dir) / "synth_manifest.txt").string(),
                          result.manifest.to_text());
      }
      return std::move(result.visits);
    });
  }
  return clock.run("ingest", [&] {
    CsvSchema schema;
    schema.delimiter = config.delimiter;
    return ingest_visits_file(*config.input_path, schema);
  });
}

CohortData prepare_cohort(const PipelineConfig& config, const std::string& out_dir,
                          bool write_artifacts, StageClock& clock) {
  CohortData data;
  VisitTable raw = obtain_raw_visits(config, out_dir, write_artifacts, clock);
  clock.run("exclusions", [&] {
    auto [kept, report] = apply_exclusions(raw);
    data.visits = std::move(kept);
    data.exclusions = report;
    if (write_artifacts)
      atomic_write_file((fs::path(out_dir) / "exclusion_report.txt").string(), report.to_text());
  });
  clock.run("link", [&] { data.timelines = link_patient_timelines(data.visits); });
  return data;
}

std::string bundle_dir_for_window(const std::string& root, int window) {
  return (fs::path(root) / "models" / ("w" + std::to_string(window))).string();
}

std::string scores_line(const std::string& visit_id, const BaseScores& s) {
  std::ostringstream ss;
  ss << visit_id << '\t' << fmt_double(s.lr) << '\t' << fmt_double(s.nb) << '\t'
     << fmt_double(s.arc1) << '\t' << fmt_double(s.arc2) << '\t' << fmt_double(s.ensemble) << '\n';
  return ss.str();
}

TrainOptions effective_train_options(const PipelineConfig& config) {
  TrainOptions options = config.train;
  if (config.vocabulary_path)
    options.fixed_vocabulary = FeatureVocabulary::from_text(read_file(*config.vocabulary_path));
  return options;
}

}  // namespace

void run_pipeline(const PipelineConfig& config, std::ostream& diagnostics) {
  validate_config(config);
  fs::create_directories(config.out_dir);
  StageClock clock(diagnostics);

  const CohortData data = prepare_cohort(config, config.out_dir, true, clock);
  const TrainOptions options = effective_train_options(config);

  std::vector<int> windows = config.windows;
  std::sort(windows.begin(), windows.end());

  std::vector<EnsembleModel> models;
  std::string training_report;
  for (int window : windows) {
    const std::string stage = "train_w" + std::to_string(window);
    TrainedWindow trained = clock.run(stage, [&] {
      return train_ensemble(data.visits, data.timelines, window, options);
    });
    training_report += trained.report.to_text();
    training_report += '\n';
    clock.run("save_w" + std::to_string(window), [&] {
      save_model_bundle(trained.model, trained.audit,
                        bundle_dir_for_window(config.out_dir, window));
    });
    models.push_back(std::move(trained.model));
  }
  atomic_write_file((fs::path(config.out_dir) / "training_report.txt").string(), training_report);

  clock.run("evaluate", [&] {
    std::vector<const EnsembleModel*> model_ptrs;
    for (const EnsembleModel& m : models) model_ptrs.push_back(&m);
    const EvalReport report = evaluate_all(model_ptrs, data.visits, data.timelines);
    atomic_write_file((fs::path(config.out_dir) / "eval_report.txt").string(), report.to_text());
  });

  clock.run("test_scores", [&] {
    for (const EnsembleModel& model : models) {
      const WindowDataset ds = build_window_dataset(data.visits, data.timelines, model.window_days);
      const SplitAssignment split =
          split_dataset(data.visits, ds.instances, model.split_seed, model.split_unit);
      std::ostringstream out;
      out << "visit_id\tlr\tnb\tarc1\tarc2\tensemble\n";
      for (std::uint32_t i = 0; i < ds.instances.size(); ++i) {
        if (split.subsets[i] != Subset::test) continue;
        const LabeledIndexVisit& inst = ds.instances[i];
        const BaseScores s = predict_ensemble(model, data.visits,
                                              data.timelines[inst.timeline_index],
                                              inst.visit_index);
        out << scores_line(data.visits[inst.visit_index].visit_id, s);
      }
      atomic_write_file(
          (fs::path(config.out_dir) / ("test_scores_w" + std::to_string(model.window_days) + ".txt"))
              .string(),
          out.str());
    }
  });
}

void run_synth(const PipelineConfig& config, std::ostream& diagnostics) {
  if (!config.synth) throw ConfigError("config error: synth command requires a synth.* section");
  fs::create_directories(config.out_dir);
  StageClock clock(diagnostics);
  clock.run("synth", [&] {
    SynthResult result = synthesize(*config.synth);
    atomic_write_file((fs::path(config.out_dir) / "cohort.csv").string(),
                      visits_to_text(result.visits));
    atomic_write_file((fs::path(config.out_dir) / "synth_manifest.txt").string(),
                      result.manifest.to_text());
  });
}

void run_ingest(const PipelineConfig& config, std::ostream& diagnostics) {
  if (!config.input_path) throw ConfigError("config error: ingest command requires input.path");
  fs::create_directories(config.out_dir);
  StageClock clock(diagnostics);
  const CohortData data = prepare_cohort(config, config.out_dir, true, clock);
  clock.run("write", [&] {
    atomic_write_file((fs::path(config.out_dir) / "cleaned.csv").string(),
                      visits_to_text(data.visits));
  });
}

void run_evaluate(const PipelineConfig& config, const std::string& bundle_root,
                  std::ostream& diagnostics) {
  validate_config(config);
  StageClock clock(diagnostics);
  const CohortData data = prepare_cohort(config, bundle_root, false, clock);

  std::vector<LoadedBundle> bundles;
  clock.run("load_models", [&] {
    for (int window : config.windows) {
      const std::string dir = bundle_dir_for_window(bundle_root, window);
      if (!fs::exists(fs::path(dir) / "manifest.txt"))
        throw Error("no bundle for window " + std::to_string(window) + " under " + dir);
      bundles.push_back(load_model_bundle(dir));
    }
  });

  clock.run("evaluate", [&] {
    std::vector<const EnsembleModel*> model_ptrs;
    for (const LoadedBundle& b : bundles) model_ptrs.push_back(&b.model);
    const EvalReport report = evaluate_all(model_ptrs, data.visits, data.timelines);
    atomic_write_file((fs::path(bundle_root) / "eval_report.txt").string(), report.to_text());
  });
}

void run_explain(const std::string& bundle_dir, int k, std::ostream& out) {
  if (k <= 0) throw Error("explain: k must be positive");
  const LoadedBundle bundle = load_model_bundle(bundle_dir);
  const EnsembleModel& model = bundle.model;

  out << "bundle " << bundle_dir << " (window " << model.window_days << ")\n\n";

  out << "top " << k << " logistic coefficients\n";
  const auto coefficients = top_coefficients(model.logistic, model.vocab, k);
  for (const auto& [field, value, coef] : coefficients) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+.4f", coef);
    out << "  " << buf << "  " << field << '=' << value << '\n';
  }

  auto print_rules = [&](const char* name, const RuleSet& rules) {
    out << '\n' << name << " rules (top " << k << " by confidence, min_support "
        << rules.min_support() << ")\n";
    out << "  CCS | Support | Confidence\n";
    std::vector<const Rule*> order;
    for (const Rule& r : rules.rules()) order.push_back(&r);
    std::stable_sort(order.begin(), order.end(), [](const Rule* a, const Rule* b) {
      if (a->confidence[1] != b->confidence[1]) return a->confidence[1] > b->confidence[1];
      if (a->support != b->support) return a->support > b->support;
      return a->antecedent < b->antecedent;
    });
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
    for (std::size_t i = 0; i < take; ++i) {
      const Rule& r = *order[i];
      std::string codes;
      for (std::size_t j = 0; j < r.antecedent.size(); ++j) {
        if (j) codes += ", ";
        codes += std::to_string(r.antecedent[j]);
      }
      char conf[16];
      std::snprintf(conf, sizeof(conf), "%.2f", r.confidence[1]);
      out << "  " << codes << " | " << r.support << " | " << conf << '\n';
    }
  };
  print_rules("ARC1 (longitudinal)", model.arc1);
  print_rules("ARC2 (horizontal)", model.arc2);

  out << "\nleakage audit\n" << bundle.audit_text;
}

void run_predict(const std::string& bundle_path, const std::string& visits_path,
                 const std::string& timelines_path, const std::string& out_path,
                 std::ostream& diagnostics) {
  // Accept either one window bundle or a directory of w<N> bundles.
  std::vector<LoadedBundle> bundles;
  if (fs::exists(fs::path(bundle_path) / "manifest.txt")) {
    bundles.push_back(load_model_bundle(bundle_path));
  } else {
    std::map<int, std::string> found;
    const fs::path root = fs::exists(fs::path(bundle_path) / "models")
                              ? fs::path(bundle_path) / "models"
                              : fs::path(bundle_path);
    if (fs::exists(root))
      for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        const std::string name = entry.path().filename().string();
        if (name.size() < 2 || name[0] != 'w') continue;
        const auto w = parse_int(name.substr(1));
        if (w && fs::exists(entry.path() / "manifest.txt"))
          found.emplace(static_cast<int>(*w), entry.path().string());
      }
    for (const auto& [window, dir] : found) bundles.push_back(load_model_bundle(dir));
    if (bundles.empty()) throw Error("no model bundle found at " + bundle_path);
  }

  const VisitTable score_visits = ingest_visits_file(visits_path);
  VisitTable history = ingest_visits_file(timelines_path);

  // Scratch table: history plus any scored visits not already present.
  std::map<std::string, std::uint32_t> by_id;
  VisitTable merged;
  for (VisitRecord& rec : history) {
    if (rec.patient_key.empty()) continue;  // unlinkable history is useless
    by_id.emplace(rec.visit_id, static_cast<std::uint32_t>(merged.size()));
    merged.push_back(std::move(rec));
  }
  std::vector<std::uint32_t> scored_index;
  for (const VisitRecord& rec : score_visits) {
    auto it = by_id.find(rec.visit_id);
    if (it != by_id.end() && merged[it->second] == rec) {
      scored_index.push_back(it->second);
      continue;
    }
    VisitRecord copy = rec;
    if (copy.patient_key.empty()) {
      // No key: give the record a private timeline so context falls back to
      // all-zero temporal features.
      copy.patient_key = "__orphan__" + copy.visit_id;
      diagnostics << "warning: visit " << copy.visit_id
                  << " has no patient_key; scoring with empty context\n";
    }
    by_id.emplace(copy.visit_id, static_cast<std::uint32_t>(merged.size()));
    scored_index.push_back(static_cast<std::uint32_t>(merged.size()));
    merged.push_back(std::move(copy));
  }

  const std::vector<PatientTimeline> timelines = link_patient_timelines(merged);
  std::map<std::string, std::uint32_t> timeline_of;
  for (std::uint32_t t = 0; t < timelines.size(); ++t)
    timeline_of.emplace(timelines[t].patient_key, t);

  std::ostringstream out;
  out << "visit_id";
  for (const LoadedBundle& b : bundles) out << "\tw" << b.model.window_days;
  out << '\n';
  for (std::size_t i = 0; i < scored_index.size(); ++i) {
    const std::uint32_t vi = scored_index[i];
    const VisitRecord& rec = merged[vi];
    if (rec.visit_type != VisitType::ed) continue;
    const PatientTimeline& tl = timelines[timeline_of.at(rec.patient_key)];
    out << score_visits[i].visit_id;
    for (const LoadedBundle& b : bundles) {
      const BaseScores s = predict_ensemble(b.model, merged, tl, vi);
      out << '\t' << fmt_double(s.ensemble);
    }
    out << '\n';
  }
  atomic_write_file(out_path, out.str());
}

}  // namespace edrisk
