#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edrisk/arc.hpp"
#include "edrisk/featurize.hpp"
#include "edrisk/linear.hpp"
#include "edrisk/metrics.hpp"
#include "edrisk/visit.hpp"

namespace edrisk {

enum class SplitUnit { record, patient };
enum class Subset : std::uint8_t { train = 0, validation = 1, test = 2 };

// 80/10/10 assignment aligned with the instance span it was built from.
struct SplitAssignment {
  std::vector<Subset> subsets;
  std::uint64_t seed = 0;
  SplitUnit unit = SplitUnit::record;
  std::array<std::size_t, 3> counts{};
};

SplitAssignment split_dataset(const VisitTable& visits,
                              std::span<const LabeledIndexVisit> instances, std::uint64_t seed,
                              SplitUnit unit);

enum class MetaFeatureMode { raw, log_odds };

struct EnsembleModel {
  int window_days = 14;
  std::uint64_t split_seed = 0;
  SplitUnit split_unit = SplitUnit::record;
  FeatureVocabulary vocab;
  LogisticModel logistic;
  NaiveBayesModel nb;
  RuleSet arc1;  // longitudinal view
  RuleSet arc2;  // horizontal view
  LogisticModel meta;  // dimension 4, inputs [lr, nb, arc1, arc2]
  MetaFeatureMode meta_mode = MetaFeatureMode::raw;
};

struct BaseScores {
  double lr = 0.0;
  double nb = 0.0;
  double arc1 = 0.0;
  double arc2 = 0.0;
  double ensemble = 0.0;
};

struct TrainOptions {
  std::uint64_t split_seed = 17;
  SplitUnit split_unit = SplitUnit::record;
  int count_bin_cap = 5;
  LogisticHyperparams lr;
  double nb_alpha = 1.0;
  std::vector<std::uint32_t> arc_grid = {5, 10, 20, 40, 80};
  std::optional<int> arc_max_len = 4;
  TieBreak tie_break = TieBreak::lexicographic;
  MetaFeatureMode meta_mode = MetaFeatureMode::log_odds;
  LogisticHyperparams meta_lr;
  std::uint32_t audit_min_count = 20;
  double audit_rate_threshold = 0.9;
  std::optional<FeatureVocabulary> fixed_vocabulary;
};

// Everything derivable per instance before any fitting: context, itemsets,
// label. Pure function of (visits, timelines, window).
struct WindowDataset {
  std::vector<LabeledIndexVisit> instances;
  std::vector<TemporalContext> contexts;
  std::vector<Itemset> longitudinal;
  std::vector<Itemset> horizontal;
  std::vector<std::uint8_t> labels;
};

WindowDataset build_window_dataset(const VisitTable& visits,
                                   const std::vector<PatientTimeline>& timelines, int window_days);

struct TrainingReport {
  int window_days = 0;
  std::uint64_t split_seed = 0;
  SplitUnit split_unit = SplitUnit::record;
  std::array<std::size_t, 3> split_counts{};
  std::array<std::size_t, 3> split_positives{};
  std::uint32_t vocabulary_dimension = 0;
  double lr_final_loss = 0.0;
  int lr_epochs = 0;
  std::uint32_t arc1_threshold = 0;
  std::uint32_t arc2_threshold = 0;
  std::vector<std::pair<std::uint32_t, double>> arc1_grid_auc;
  std::vector<std::pair<std::uint32_t, double>> arc2_grid_auc;
  std::size_t arc1_rules = 0;
  std::size_t arc2_rules = 0;
  std::vector<double> meta_weights;  // 4 weights then intercept
  // split consumed per stage, for the no-leakage audit trail
  std::vector<std::pair<std::string, std::string>> stage_inputs;
  std::vector<std::string> warnings;

  std::string to_text() const;
};

struct TrainedWindow {
  EnsembleModel model;
  TrainingReport report;
  std::vector<LeakageFlag> audit;  // computed over TRAIN
};

TrainedWindow train_ensemble(const VisitTable& visits,
                             const std::vector<PatientTimeline>& timelines, int window_days,
                             const TrainOptions& options);

BaseScores predict_ensemble(const EnsembleModel& model, const VisitTable& visits,
                            const PatientTimeline& timeline, std::uint32_t visit_index);

struct EvalRow {
  int window_days = 0;
  double lr = 0.0, arc1 = 0.0, arc2 = 0.0, nb = 0.0, ensemble = 0.0;
  std::size_t test_instances = 0;
  std::size_t test_positives = 0;
  std::string error;  // non-empty when this window could not be evaluated
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::string to_text() const;
};

// AUC per (window, classifier) on each model's recomputed TEST subset.
// A degenerate window is reported as an error row; the others still evaluate.
EvalReport evaluate_all(const std::vector<const EnsembleModel*>& models, const VisitTable& visits,
                        const std::vector<PatientTimeline>& timelines);

}  // namespace edrisk
